#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fgs/augment.hpp"
#include "fgs/classifier.hpp"
#include "fgs/corpus.hpp"
#include "fgs/embedding.hpp"
#include "fgs/lexicon.hpp"
#include "fgs/tagscheme.hpp"
#include "fgs/train_config.hpp"

namespace fgs::tools {

enum class Task { Extract, Classify };

enum class SourceKind { Gold, Model, Ensemble, Lexicon };

// Where expression spans for bracket augmentation come from at evaluation
// time. Training always brackets gold expressions.
struct ExpressionSourceSpec {
  SourceKind kind = SourceKind::Gold;
  std::vector<std::filesystem::path> paths;  // model, ensemble members, or lexicon files
  LexiconFormat lexicon_format = LexiconFormat::Plain;

  std::string label() const;
  Json to_json() const;
  bool operator==(const ExpressionSourceSpec&) const = default;
};

// Relative dataset, model and lexicon paths resolve against FGS_DATA_DIR when
// set, otherwise against the spec file's directory; the output directory
// resolves against the spec file's directory.
struct ExperimentSpec {
  Task task = Task::Extract;
  std::filesystem::path train;
  std::filesystem::path dev;  // optional
  std::filesystem::path test;
  std::vector<TagScheme> schemes;               // extraction
  std::vector<PoolingStrategy> strategies;      // classification
  std::vector<AugmentMode> modes = {AugmentMode::Original};
  std::vector<ExpressionSourceSpec> sources = {ExpressionSourceSpec{}};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  TrainConfig config;
  Json embedding = Json{{"kind", "hashed-static"}, {"dimension", 64}, {"seed", 0}, {"window", 1}};
  std::filesystem::path output;

  // Throws ValidationError on missing paths, duplicate seeds or empty axes.
  void validate() const;
  // Canonical form: every field, keys sorted.
  Json to_json() const;
};

ExperimentSpec parse_spec(const Json& document, const std::filesystem::path& base_dir,
                          const std::optional<std::filesystem::path>& data_root);
// Reads the file and resolves paths (data root from FGS_DATA_DIR).
ExperimentSpec load_spec(const std::filesystem::path& path);

// One trained-and-evaluated configuration.
struct Cell {
  std::string row;  // scheme or strategy name
  std::optional<TagScheme> scheme;
  std::optional<PoolingStrategy> strategy;
  AugmentMode mode = AugmentMode::Original;
  ExpressionSourceSpec source;
  std::uint64_t seed = 1;

  std::string column() const;  // mode/source
  Json to_json() const;
};

// |rows| x |modes| x |sources| x |seeds|, seeds innermost.
std::vector<Cell> enumerate_cells(const ExperimentSpec& spec);

struct RunRecord {
  std::string spec_hash;
  std::string cell_hash;
  Json cell;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  // extract: target_f1 (primary), holder_f1, expression_f1, dev_history;
  // classify: macro_f1 (primary), accuracy, dev_history.
  Json metrics = Json::object();
  std::string model_path;
  double wall_clock_seconds = 0.0;
  std::string timestamp;

  Json to_json() const;
  static RunRecord from_json(const Json& object);
};

struct RunOptions {
  int jobs = 1;
  bool force = false;
  std::ostream* log = nullptr;
};

struct SweepResult {
  std::vector<RunRecord> records;  // in cell order
  std::size_t executed = 0;
  std::size_t cached = 0;
  std::size_t failed = 0;
};

// Content hash of the canonical spec.
std::string spec_hash(const ExperimentSpec& spec);
// Content hash of the canonical cell, shared settings and input file digests.
std::string cell_hash(const ExperimentSpec& spec, const Cell& cell);

// Runs every cell not already recorded under output/cells/<hash>/ (all of
// them with force), appends executed records to output/runs.jsonl and writes
// report.txt, report.json and matrix.csv. A failing cell is recorded with
// its error and does not stop the sweep.
SweepResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

// Aggregated table rows: one per (row, column) with mean (std) over seeds of
// the primary metric and a +/- marker against the original-mode baseline.
struct ReportRow {
  std::string row;
  std::string column;
  std::size_t runs = 0;
  std::size_t failed = 0;
  double mean = 0.0;
  double std = 0.0;
  std::string marker;  // "+", "-" or empty
};

std::vector<ReportRow> build_report(Task task, const std::vector<RunRecord>& records);
std::string report_text(Task task, const std::vector<ReportRow>& rows);
Json report_json(Task task, const std::vector<ReportRow>& rows);
std::string report_matrix_csv(const std::vector<ReportRow>& rows);

std::string primary_metric(Task task);

}  // namespace fgs::tools
