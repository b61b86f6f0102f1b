#pragma once

#include <string>

#include "fgs/corpus.hpp"

namespace fgs {

struct ElementStats {
  long count = 0;
  long total_length = 0;
  long max_length = 0;
  // total_length / count, rounded half-up to one decimal (0 when count == 0).
  double average_length = 0.0;

  bool operator==(const ElementStats&) const = default;
};

struct StatsReport {
  long sentences = 0;
  long tokens = 0;
  double average_sentence_length = 0.0;
  ElementStats holders;
  ElementStats targets;
  ElementStats expressions;
  long positive = 0;
  long neutral = 0;
  long negative = 0;

  bool operator==(const StatsReport&) const = default;
};

// Percentages in [0, 100]; a split with no targets reports 0.
struct OverlapReport {
  double unique_train = 0.0;
  double unique_dev = 0.0;
  double unique_test = 0.0;
  double overlap_dev = 0.0;
  double overlap_test = 0.0;
};

// Rounds numerator / denominator half-up to one decimal using integer
// arithmetic, so 61 / 10 -> 6.1 and 1 / 20 -> 0.1 exactly.
double ratio_one_decimal(long numerator, long denominator);

StatsReport compute_stats(const Corpus& corpus);

// Targets are compared by exact surface form; partial matches do not count.
OverlapReport compute_overlap(const Corpus& train, const Corpus& dev,
                              const Corpus& test);

Json to_json(const StatsReport& report);
Json to_json(const OverlapReport& report);

// One-line row in the layout of a dataset statistics table.
std::string stats_table(const std::string& name, const StatsReport& report);
std::string overlap_table(const std::string& name, const OverlapReport& report);

}  // namespace fgs
