#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fgs/corpus.hpp"
#include "fgs/tagscheme.hpp"

namespace fgs {

struct PrfCounts {
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;

  // 0/0 is defined as 0 throughout.
  double precision() const;
  double recall() const;
  double f1() const;

  PrfCounts& operator+=(const PrfCounts& other);
  bool operator==(const PrfCounts&) const = default;
};

// Token-level scores: a token counts for `element` when its tag is non-O
// with that element. B/I and polarity suffixes are ignored. Throws on length
// mismatch.
PrfCounts token_f1(const TagSequence& gold, const TagSequence& pred, Element element);
// Micro-aggregated over sentences.
PrfCounts token_f1(std::span<const TagSequence> gold, std::span<const TagSequence> pred,
                   Element element);

struct TokenF1Report {
  std::vector<std::pair<Element, PrfCounts>> elements;

  const PrfCounts& at(Element element) const;
};

TokenF1Report token_f1_report(std::span<const TagSequence> gold,
                              std::span<const TagSequence> pred,
                              std::span<const Element> elements);

// Class order positive, neutral, negative.
inline constexpr std::array<Polarity, 3> kPolarityClasses = {
    Polarity::Positive, Polarity::Neutral, Polarity::Negative};

struct MacroF1Report {
  std::array<PrfCounts, 3> classes;
  double macro_f1 = 0.0;
  std::size_t scored = 0;
  std::size_t discarded = 0;  // gold conflict items dropped
};

// Unweighted mean of per-class F1 over the fixed three classes; a class
// absent from gold still enters the mean with F1 = 0. Gold conflict items are
// discarded when `discard_conflict`, otherwise they are an error. A conflict
// prediction is a miss for its gold class.
MacroF1Report macro_f1(std::span<const Polarity> gold, std::span<const Polarity> pred,
                       bool discard_conflict = true);

struct RunAggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1), 0 for one run
  std::size_t runs = 0;
};

RunAggregate aggregate_runs(std::span<const double> values);

struct Correlation {
  double r = 0.0;
  double p = 1.0;  // two-sided, Student t with n - 2 degrees of freedom
};

// Requires n >= 3 and non-zero variance in both inputs.
Correlation pearson(std::span<const double> xs, std::span<const double> ys);

// Scores with gold/pred in both orientations; precision of one equals
// recall of the other.
struct SwapCheck {
  PrfCounts forward;   // pred scored against gold
  PrfCounts backward;  // gold scored against pred
};

SwapCheck significance_swap(std::span<const TagSequence> gold,
                            std::span<const TagSequence> pred, Element element);

Json to_json(const PrfCounts& counts);
Json to_json(const TokenF1Report& report);
Json to_json(const MacroF1Report& report);
Json to_json(const RunAggregate& aggregate);

// "63.5 (2.1)": mean and std scaled by 100, one decimal.
std::string format_mean_std(const RunAggregate& aggregate);

inline constexpr std::string_view kMacroF1Note =
    "macro F1 over {positive, neutral, negative}; classes absent from gold "
    "contribute F1 = 0; gold conflict items discarded";

}  // namespace fgs
