#include "fgs_tools/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fgs/ensemble.hpp"
#include "fgs/error.hpp"
#include "fgs/eval.hpp"
#include "fgs/model_io.hpp"
#include "fgs/tagger.hpp"
#include "fgs_tools/digest.hpp"

namespace fgs::tools {

namespace {

namespace fs = std::filesystem;

// Sorted-key JSON, used wherever a hash must not depend on field order.
std::string canonical(const Json& value) { return nlohmann::json::parse(value.dump()).dump(); }

std::string task_name(Task task) { return task == Task::Extract ? "extract" : "classify"; }

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

std::string required_string(const Json& object, const char* key) {
  if (!object.contains(key) || !object[key].is_string()) {
    throw ValidationError(std::string("experiment spec: \"") + key + "\" must be a string");
  }
  return object[key].get<std::string>();
}

// A single value or an array of values under either key.
std::vector<Json> one_or_many(const Json& document, const char* plural, const char* singular) {
  std::vector<Json> out;
  if (document.contains(plural)) {
    if (!document[plural].is_array()) {
      throw ValidationError(std::string("experiment spec: \"") + plural + "\" must be an array");
    }
    for (const Json& v : document[plural]) out.push_back(v);
  } else if (document.contains(singular)) {
    out.push_back(document[singular]);
  }
  return out;
}

TagScheme parse_scheme(const Json& value) {
  std::string strategy;
  std::string mode = "targeted";
  if (value.is_string()) {
    strategy = value.get<std::string>();
    if (const auto colon = strategy.find(':'); colon != std::string::npos) {
      mode = strategy.substr(colon + 1);
      strategy.resize(colon);
    }
  } else if (value.is_object()) {
    strategy = required_string(value, "strategy");
    mode = value.value("mode", mode);
  } else {
    throw ValidationError("experiment spec: a scheme is a string or an object");
  }
  const auto s = strategy_from_string(strategy);
  const auto m = task_mode_from_string(mode);
  if (!s) throw ValidationError("experiment spec: unknown scheme strategy \"" + strategy + "\"");
  if (!m) throw ValidationError("experiment spec: unknown task mode \"" + mode + "\"");
  return {*s, *m};
}

ExpressionSourceSpec parse_source(const Json& value, const fs::path& data_root) {
  ExpressionSourceSpec source;
  if (value.is_string() && value.get<std::string>() == "gold") return source;
  if (!value.is_object()) {
    throw ValidationError("experiment spec: a source is \"gold\" or an object");
  }
  auto paths_of = [&](const Json& v) {
    std::vector<fs::path> out;
    if (v.is_string()) {
      out.push_back(resolve(v.get<std::string>(), data_root));
    } else if (v.is_array()) {
      for (const Json& p : v) out.push_back(resolve(p.get<std::string>(), data_root));
    } else {
      throw ValidationError("experiment spec: source paths must be strings");
    }
    return out;
  };
  if (value.contains("model")) {
    source.kind = SourceKind::Model;
    source.paths = paths_of(value["model"]);
    if (source.paths.size() != 1) {
      throw ValidationError("experiment spec: a model source names exactly one model");
    }
  } else if (value.contains("ensemble")) {
    source.kind = SourceKind::Ensemble;
    source.paths = paths_of(value["ensemble"]);
    if (source.paths.empty()) throw ValidationError("experiment spec: empty ensemble source");
  } else if (value.contains("lexicon")) {
    source.kind = SourceKind::Lexicon;
    source.paths = paths_of(value["lexicon"]);
    const std::string format = value.value("format", std::string("plain"));
    const auto f = lexicon_format_from_string(format);
    if (!f) throw ValidationError("experiment spec: unknown lexicon format \"" + format + "\"");
    source.lexicon_format = *f;
  } else {
    throw ValidationError("experiment spec: source needs \"model\", \"ensemble\" or \"lexicon\"");
  }
  return source;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string digest_or_empty(const fs::path& p) { return p.empty() ? "" : file_sha256(p); }

Json embedding_identity(const Json& embedding) {
  Json identity = embedding;
  if (identity.contains("path")) {
    identity["sha256"] = file_sha256(identity["path"].get<std::string>());
    identity.erase("path");
  }
  return identity;
}

// Per-sentence expression spans for one source, computed once per sweep.
// Keyed by sent_id and tokens so dev and test ids may repeat.
using ExpressionTable = std::map<std::string, std::vector<LabeledSpan>, std::less<>>;

std::string sentence_key(const Sentence& s) {
  std::string key = s.sent_id;
  for (const std::string& t : s.tokens) key += '\x1f' + t;
  return key;
}

std::vector<LabeledSpan> expressions_only(const TagSequence& tags) {
  TagSequence plain = restrict_to(tags, Element::Expression);
  for (Tag& t : plain) t.polarity.reset();
  std::vector<LabeledSpan> spans;
  for (const LabeledSpan& s : decode(plain, {Strategy::Joint, TaskMode::Targeted})) {
    if (s.element == Element::Expression) spans.push_back(s);
  }
  return spans;
}

struct ExpressionModel {
  TaggerModel model;
  std::shared_ptr<const EmbeddingProvider> provider;
};

ExpressionModel load_expression_model(const fs::path& path,
                                      const std::shared_ptr<const EmbeddingProvider>& fallback) {
  ExpressionModel m{load_tagger(path), fallback};
  if (m.model.scheme.strategy == Strategy::Target) {
    throw ValidationError(path.string() + ": expression source model does not tag expressions (" +
                          m.model.scheme.name() + ")");
  }
  if (m.model.mode == AugmentMode::Expressions || m.model.mode == AugmentMode::Full) {
    throw ValidationError(path.string() +
                          ": expression source model itself needs expression brackets");
  }
  const Json sidecar = load_sidecar(path);
  if (sidecar.contains("embedding")) m.provider = make_provider(sidecar["embedding"]);
  return m;
}

ExpressionTable compute_expressions(const ExpressionSourceSpec& source,
                                    const std::vector<const Corpus*>& corpora,
                                    const std::shared_ptr<const EmbeddingProvider>& provider) {
  ExpressionTable table;
  if (source.kind == SourceKind::Lexicon) {
    const Lexicon lexicon = load_lexicon(source.paths, source.lexicon_format);
    for (const Corpus* c : corpora) {
      for (const Sentence& s : c->sentences) table[sentence_key(s)] = mark_expressions(s, lexicon);
    }
    return table;
  }
  std::vector<ExpressionModel> members;
  for (const fs::path& p : source.paths) members.push_back(load_expression_model(p, provider));
  for (const Corpus* c : corpora) {
    for (const Sentence& s : c->sentences) {
      std::vector<TagSequence> predictions;
      for (const ExpressionModel& m : members) {
        TagSequence tags = restrict_to(predict_tags(m.model, s, *m.provider), Element::Expression);
        for (Tag& t : tags) t.polarity.reset();
        predictions.push_back(std::move(tags));
      }
      table[sentence_key(s)] = expressions_only(
          predictions.size() == 1 ? predictions.front() : ensemble_union(predictions));
    }
  }
  return table;
}

// Everything a cell reads, shared read-only across workers.
struct SweepInputs {
  Corpus train;
  std::optional<Corpus> dev;
  Corpus test;
  std::shared_ptr<const EmbeddingProvider> provider;
  std::vector<ExpressionTable> expressions;  // parallel to spec.sources; empty for gold
};

ExpressionSource lookup(const SweepInputs& in, std::size_t source_index,
                        const ExpressionSourceSpec& source, const Sentence& s) {
  if (source.kind == SourceKind::Gold) return std::nullopt;
  const ExpressionTable& table = in.expressions[source_index];
  const auto it = table.find(sentence_key(s));
  if (it == table.end()) return std::vector<LabeledSpan>{};
  return it->second;
}

std::vector<Element> scored_elements(const TagScheme& scheme) {
  std::set<Element> present;
  for (const Tag& t : label_inventory(scheme)) {
    if (t.position != Position::O) present.insert(t.element);
  }
  return {present.begin(), present.end()};
}

std::string metric_name(Element e) {
  switch (e) {
    case Element::Holder: return "holder_f1";
    case Element::Target: return "target_f1";
    case Element::Expression: return "expression_f1";
    case Element::None: break;
  }
  throw Error("unknown element");
}

Json run_extract_cell(const ExperimentSpec& spec, const SweepInputs& in, const Cell& cell,
                      std::size_t source_index, const fs::path& cell_dir, std::string& model_path) {
  TrainConfig config = spec.config;
  config.seed = cell.seed;
  std::vector<double> history;
  TaggerTrainOptions options;
  if (in.dev) {
    options.dev = &*in.dev;
    options.dev_history = &history;
    options.dev_expressions = [&](const Sentence& s) {
      return lookup(in, source_index, cell.source, s);
    };
  }
  const TagScheme scheme = *cell.scheme;
  const TaggerModel model =
      train_tagger(in.train, scheme, cell.mode, *in.provider, config, options);

  std::vector<TagSequence> gold;
  std::vector<TagSequence> predicted;
  for (const Sentence& s : in.test.sentences) {
    gold.push_back(encode(s, scheme));
    predicted.push_back(
        predict_tags(model, s, *in.provider, lookup(in, source_index, cell.source, s)));
  }
  Json metrics = Json::object();
  for (const Element e : scored_elements(scheme)) {
    metrics[metric_name(e)] = token_f1(gold, predicted, e).f1();
  }
  metrics["dev_history"] = history;

  const fs::path path = cell_dir / "model.fgsm";
  save_model(model, path,
             Json{{"embedding", spec.embedding}, {"config", to_json(config)}, {"cell", cell.to_json()}});
  model_path = path.string();
  return metrics;
}

std::vector<ClassificationExample> with_source(std::vector<ClassificationExample> examples,
                                               const SweepInputs& in, std::size_t source_index,
                                               const ExpressionSourceSpec& source) {
  for (ClassificationExample& e : examples) {
    e.expressions = lookup(in, source_index, source, e.sentence);
  }
  return examples;
}

Json run_classify_cell(const ExperimentSpec& spec, const SweepInputs& in, const Cell& cell,
                       std::size_t source_index, const fs::path& cell_dir,
                       std::string& model_path) {
  TrainConfig config = spec.config;
  config.seed = cell.seed;
  const std::vector<ClassificationExample> train = classification_examples(in.train);
  std::vector<ClassificationExample> dev;
  std::vector<double> history;
  ClassifierTrainOptions options;
  if (in.dev) {
    dev = with_source(classification_examples(*in.dev), in, source_index, cell.source);
    options.dev = &dev;
    options.dev_history = &history;
  }
  const ClassifierModel model =
      train_classifier(train, *cell.strategy, cell.mode, *in.provider, config, options);

  const std::vector<ClassificationExample> test =
      with_source(classification_examples(in.test), in, source_index, cell.source);
  std::vector<Polarity> gold;
  std::vector<Polarity> predicted;
  std::size_t correct = 0;
  for (const ClassificationExample& e : test) {
    gold.push_back(e.gold);
    predicted.push_back(
        predict_polarity(model, e.sentence, e.target, *in.provider, e.expressions).label);
    if (predicted.back() == gold.back()) ++correct;
  }
  Json metrics = Json::object();
  metrics["macro_f1"] = test.empty() ? 0.0 : macro_f1(gold, predicted).macro_f1;
  metrics["accuracy"] =
      test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
  metrics["dev_history"] = history;

  const fs::path path = cell_dir / "model.fgsm";
  save_model(model, path,
             Json{{"embedding", spec.embedding}, {"config", to_json(config)}, {"cell", cell.to_json()}});
  model_path = path.string();
  return metrics;
}

std::optional<RunRecord> cached_record(const fs::path& record_path) {
  std::ifstream in(record_path);
  if (!in) return std::nullopt;
  try {
    RunRecord r = RunRecord::from_json(Json::parse(in));
    if (r.ok) return r;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::size_t source_index_of(const ExperimentSpec& spec, const ExpressionSourceSpec& source) {
  const auto it = std::find(spec.sources.begin(), spec.sources.end(), source);
  return static_cast<std::size_t>(it - spec.sources.begin());
}

}  // namespace

std::string ExpressionSourceSpec::label() const {
  auto stems = [&] {
    std::string out;
    for (const fs::path& p : paths) out += (out.empty() ? "" : ",") + p.stem().string();
    return out;
  };
  switch (kind) {
    case SourceKind::Gold: return "gold";
    case SourceKind::Model: return "model:" + stems();
    case SourceKind::Ensemble: return "ensemble:" + stems();
    case SourceKind::Lexicon: return "lexicon:" + stems();
  }
  return "gold";
}

Json ExpressionSourceSpec::to_json() const {
  std::vector<std::string> files;
  for (const fs::path& p : paths) files.push_back(p.string());
  switch (kind) {
    case SourceKind::Gold: return "gold";
    case SourceKind::Model: return Json{{"model", files.front()}};
    case SourceKind::Ensemble: return Json{{"ensemble", files}};
    case SourceKind::Lexicon:
      return Json{{"lexicon", files},
                  {"format", lexicon_format == LexiconFormat::Tsv ? "tsv" : "plain"}};
  }
  return "gold";
}

void ExperimentSpec::validate() const {
  auto must_exist = [](const fs::path& p, const std::string& what) {
    if (p.empty()) throw ValidationError("experiment spec: missing " + what + " path");
    if (!fs::exists(p)) {
      throw ValidationError("experiment spec: " + what + " path does not exist: " + p.string());
    }
  };
  must_exist(train, "train");
  must_exist(test, "test");
  if (!dev.empty()) must_exist(dev, "dev");
  for (const ExpressionSourceSpec& s : sources) {
    for (const fs::path& p : s.paths) must_exist(p, "expression source");
  }
  if (embedding.contains("path")) must_exist(embedding["path"].get<std::string>(), "embedding");
  if (task == Task::Extract && schemes.empty()) {
    throw ValidationError("experiment spec: extraction needs at least one scheme");
  }
  if (task == Task::Classify && strategies.empty()) {
    throw ValidationError("experiment spec: classification needs at least one strategy");
  }
  if (modes.empty()) throw ValidationError("experiment spec: no augment modes");
  if (sources.empty()) throw ValidationError("experiment spec: no expression sources");
  if (seeds.empty()) throw ValidationError("experiment spec: no seeds");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ValidationError("experiment spec: seeds must be distinct");
  }
  if (std::set<AugmentMode>(modes.begin(), modes.end()).size() != modes.size()) {
    throw ValidationError("experiment spec: augment modes must be distinct");
  }
  if (output.empty()) throw ValidationError("experiment spec: missing output directory");
  config.validate();
}

Json ExperimentSpec::to_json() const {
  Json j;
  j["task"] = task_name(task);
  j["train"] = train.string();
  j["dev"] = dev.string();
  j["test"] = test.string();
  j["schemes"] = Json::array();
  for (const TagScheme& s : schemes) {
    j["schemes"].push_back({{"strategy", to_string(s.strategy)}, {"mode", to_string(s.mode)}});
  }
  j["strategies"] = Json::array();
  for (const PoolingStrategy s : strategies) j["strategies"].push_back(to_string(s));
  j["modes"] = Json::array();
  for (const AugmentMode m : modes) j["modes"].push_back(fgs::to_string(m));
  j["sources"] = Json::array();
  for (const ExpressionSourceSpec& s : sources) j["sources"].push_back(s.to_json());
  j["seeds"] = seeds;
  j["config"] = fgs::to_json(config);
  j["embedding"] = embedding;
  j["output"] = output.string();
  return Json::parse(canonical(j));
}

ExperimentSpec parse_spec(const Json& document, const fs::path& base_dir,
                          const std::optional<fs::path>& data_root) {
  if (!document.is_object()) throw ValidationError("experiment spec: expected a JSON object");
  const fs::path root = data_root.value_or(base_dir);
  ExperimentSpec spec;
  const std::string task = required_string(document, "task");
  if (task == "extract") {
    spec.task = Task::Extract;
  } else if (task == "classify") {
    spec.task = Task::Classify;
  } else {
    throw ValidationError("experiment spec: task must be \"extract\" or \"classify\"");
  }
  spec.train = resolve(required_string(document, "train"), root);
  spec.test = resolve(required_string(document, "test"), root);
  if (document.contains("dev")) spec.dev = resolve(required_string(document, "dev"), root);

  for (const Json& s : one_or_many(document, "schemes", "scheme")) {
    spec.schemes.push_back(parse_scheme(s));
  }
  for (const Json& s : one_or_many(document, "strategies", "strategy")) {
    const auto p = s.is_string() ? pooling_from_string(s.get<std::string>()) : std::nullopt;
    if (!p) throw ValidationError("experiment spec: unknown pooling strategy " + s.dump());
    spec.strategies.push_back(*p);
  }
  if (const auto modes = one_or_many(document, "modes", "mode"); !modes.empty()) {
    spec.modes.clear();
    for (const Json& m : modes) {
      const auto mode = m.is_string() ? augment_mode_from_string(m.get<std::string>())
                                      : std::nullopt;
      if (!mode) throw ValidationError("experiment spec: unknown augment mode " + m.dump());
      spec.modes.push_back(*mode);
    }
  }
  if (const auto sources = one_or_many(document, "sources", "source"); !sources.empty()) {
    spec.sources.clear();
    for (const Json& s : sources) spec.sources.push_back(parse_source(s, root));
  }
  if (document.contains("seeds")) {
    try {
      spec.seeds = document["seeds"].get<std::vector<std::uint64_t>>();
    } catch (const Json::exception&) {
      throw ValidationError("experiment spec: seeds must be non-negative integers");
    }
  }
  if (document.contains("config")) spec.config = train_config_from_json(document["config"]);
  if (document.contains("embedding")) {
    spec.embedding = document["embedding"];
    if (!spec.embedding.is_object()) {
      throw ValidationError("experiment spec: embedding must be an object");
    }
    if (spec.embedding.contains("path")) {
      spec.embedding["path"] =
          resolve(spec.embedding["path"].get<std::string>(), root).string();
    }
  }
  spec.output = resolve(document.value("output", std::string("output")), base_dir);
  return spec;
}

ExperimentSpec load_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open experiment spec " + path.string());
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::optional<fs::path> root;
  if (const char* env = std::getenv("FGS_DATA_DIR"); env != nullptr && *env != '\0') root = env;
  ExperimentSpec spec = parse_spec(document, fs::absolute(path).parent_path(), root);
  spec.validate();
  return spec;
}

std::string Cell::column() const {
  std::string c(fgs::to_string(mode));
  if (source.kind != SourceKind::Gold) c += "+" + source.label();
  return c;
}

Json Cell::to_json() const {
  Json j;
  j["row"] = row;
  if (scheme) {
    j["scheme"] = {{"strategy", fgs::to_string(scheme->strategy)},
                   {"mode", fgs::to_string(scheme->mode)}};
  }
  if (strategy) j["strategy"] = fgs::to_string(*strategy);
  j["mode"] = fgs::to_string(mode);
  j["source"] = source.label();
  j["seed"] = seed;
  return j;
}

std::vector<Cell> enumerate_cells(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  auto sweep = [&](Cell base) {
    for (const AugmentMode mode : spec.modes) {
      for (const ExpressionSourceSpec& source : spec.sources) {
        for (const std::uint64_t seed : spec.seeds) {
          Cell c = base;
          c.mode = mode;
          c.source = source;
          c.seed = seed;
          cells.push_back(std::move(c));
        }
      }
    }
  };
  if (spec.task == Task::Extract) {
    for (const TagScheme& s : spec.schemes) {
      Cell c;
      c.row = s.name();
      c.scheme = s;
      sweep(c);
    }
  } else {
    for (const PoolingStrategy s : spec.strategies) {
      Cell c;
      c.row = std::string(fgs::to_string(s));
      c.strategy = s;
      sweep(c);
    }
  }
  return cells;
}

Json RunRecord::to_json() const {
  return Json{{"spec_hash", spec_hash},
              {"cell_hash", cell_hash},
              {"cell", cell},
              {"seed", seed},
              {"status", ok ? "ok" : "failed"},
              {"error", error},
              {"metrics", metrics},
              {"model_path", model_path},
              {"wall_clock_seconds", wall_clock_seconds},
              {"timestamp", timestamp}};
}

RunRecord RunRecord::from_json(const Json& object) {
  RunRecord r;
  r.spec_hash = object.at("spec_hash").get<std::string>();
  r.cell_hash = object.at("cell_hash").get<std::string>();
  r.cell = object.at("cell");
  r.seed = object.at("seed").get<std::uint64_t>();
  r.ok = object.at("status") == "ok";
  r.error = object.value("error", std::string());
  r.metrics = object.value("metrics", Json::object());
  r.model_path = object.value("model_path", std::string());
  r.wall_clock_seconds = object.value("wall_clock_seconds", 0.0);
  r.timestamp = object.value("timestamp", std::string());
  return r;
}

std::string spec_hash(const ExperimentSpec& spec) { return sha256_hex(canonical(spec.to_json())); }

std::string cell_hash(const ExperimentSpec& spec, const Cell& cell) {
  TrainConfig shared = spec.config;
  shared.seed = cell.seed;
  Json sources = Json::array();
  for (const fs::path& p : cell.source.paths) sources.push_back(file_sha256(p));
  const Json key = {{"format", 1},
                    {"task", task_name(spec.task)},
                    {"cell", cell.to_json()},
                    {"config", fgs::to_json(shared)},
                    {"embedding", embedding_identity(spec.embedding)},
                    {"train", file_sha256(spec.train)},
                    {"dev", digest_or_empty(spec.dev)},
                    {"test", file_sha256(spec.test)},
                    {"source_files", sources},
                    {"source", cell.source.to_json()}};
  return sha256_hex(canonical(key));
}

std::string primary_metric(Task task) { return task == Task::Extract ? "target_f1" : "macro_f1"; }

SweepResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  const std::vector<Cell> cells = enumerate_cells(spec);
  const std::string spec_digest = spec_hash(spec);
  fs::create_directories(spec.output / "cells");

  std::vector<std::string> hashes;
  hashes.reserve(cells.size());
  for (const Cell& c : cells) hashes.push_back(cell_hash(spec, c));

  SweepResult result;
  result.records.resize(cells.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const fs::path record_path = spec.output / "cells" / hashes[i] / "record.json";
    std::optional<RunRecord> hit = options.force ? std::nullopt : cached_record(record_path);
    if (hit) {
      result.records[i] = std::move(*hit);
      ++result.cached;
    } else {
      pending.push_back(i);
    }
  }

  std::mutex io;
  auto log = [&](const std::string& line) {
    if (!options.log) return;
    const std::lock_guard lock(io);
    *options.log << line << '\n';
  };

  if (!pending.empty()) {
    SweepInputs in;
    in.train = load_corpus(spec.train);
    if (!spec.dev.empty()) in.dev = load_corpus(spec.dev);
    in.test = load_corpus(spec.test);
    in.provider = make_provider(spec.embedding);
    std::vector<const Corpus*> evaluated = {&in.test};
    if (in.dev) evaluated.push_back(&*in.dev);
    for (const ExpressionSourceSpec& s : spec.sources) {
      in.expressions.push_back(s.kind == SourceKind::Gold
                                   ? ExpressionTable{}
                                   : compute_expressions(s, evaluated, in.provider));
    }

    std::ofstream runs(spec.output / "runs.jsonl", std::ios::app);
    if (!runs) throw Error("cannot append to " + (spec.output / "runs.jsonl").string());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < pending.size(); k = next++) {
        const std::size_t i = pending[k];
        const Cell& cell = cells[i];
        const fs::path cell_dir = spec.output / "cells" / hashes[i];
        RunRecord record;
        record.spec_hash = spec_digest;
        record.cell_hash = hashes[i];
        record.cell = cell.to_json();
        record.seed = cell.seed;
        const auto start = std::chrono::steady_clock::now();
        try {
          fs::create_directories(cell_dir);
          const std::size_t source_index = source_index_of(spec, cell.source);
          record.metrics =
              spec.task == Task::Extract
                  ? run_extract_cell(spec, in, cell, source_index, cell_dir, record.model_path)
                  : run_classify_cell(spec, in, cell, source_index, cell_dir, record.model_path);
          record.ok = true;
        } catch (const std::exception& e) {
          record.ok = false;
          record.error = e.what();
        }
        record.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        record.timestamp = utc_timestamp();
        const std::string line = record.to_json().dump();
        try {
          write_atomically(cell_dir / "record.json", record.to_json().dump(2) + "\n");
        } catch (const std::exception& e) {
          record.ok = false;
          record.error = e.what();
        }
        {
          const std::lock_guard lock(io);
          runs << line << '\n';
          runs.flush();
        }
        log(std::string(record.ok ? "done   " : "FAILED ") + cell.row + " " + cell.column() +
            " seed=" + std::to_string(cell.seed) + (record.ok ? "" : ": " + record.error));
        result.records[i] = std::move(record);
      }
    };
    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(pending.size())));
    std::vector<std::thread> threads;
    for (int t = 1; t < jobs; ++t) threads.emplace_back(worker);
    worker();
    for (std::thread& t : threads) t.join();
  }

  result.executed = pending.size();
  for (const RunRecord& r : result.records) {
    if (!r.ok) ++result.failed;
  }

  const std::vector<ReportRow> rows = build_report(spec.task, result.records);
  write_atomically(spec.output / "report.txt", report_text(spec.task, rows));
  write_atomically(spec.output / "report.json", report_json(spec.task, rows).dump(2) + "\n");
  write_atomically(spec.output / "matrix.csv", report_matrix_csv(rows));
  return result;
}

std::vector<ReportRow> build_report(Task task, const std::vector<RunRecord>& records) {
  const std::string metric = primary_metric(task);
  std::vector<ReportRow> rows;
  std::vector<std::vector<double>> values;
  for (const RunRecord& r : records) {
    const std::string row = r.cell.at("row").get<std::string>();
    std::string column = r.cell.at("mode").get<std::string>();
    if (const std::string source = r.cell.at("source").get<std::string>(); source != "gold") {
      column += "+" + source;
    }
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& x) {
      return x.row == row && x.column == column;
    });
    if (it == rows.end()) {
      ReportRow fresh;
      fresh.row = row;
      fresh.column = column;
      rows.push_back(std::move(fresh));
      values.emplace_back();
      it = rows.end() - 1;
    }
    const auto index = static_cast<std::size_t>(it - rows.begin());
    if (r.ok && r.metrics.contains(metric)) {
      values[index].push_back(r.metrics[metric].get<double>());
    } else {
      ++it->failed;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].runs = values[i].size();
    if (!values[i].empty()) {
      const RunAggregate a = aggregate_runs(values[i]);
      rows[i].mean = a.mean;
      rows[i].std = a.std;
    }
  }
  // Baseline: the original-mode column of the same row.
  for (ReportRow& r : rows) {
    if (r.runs == 0 || r.column.rfind("original", 0) == 0) continue;
    const auto base = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& x) {
      return x.row == r.row && x.column == "original" && x.runs > 0;
    });
    if (base == rows.end()) continue;
    if (r.mean > base->mean) r.marker = "+";
    if (r.mean < base->mean) r.marker = "-";
  }
  return rows;
}

namespace {

std::vector<std::string> ordered_unique(const std::vector<ReportRow>& rows, bool columns) {
  std::vector<std::string> out;
  for (const ReportRow& r : rows) {
    const std::string& v = columns ? r.column : r.row;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

std::string cell_text(const ReportRow& r) {
  if (r.runs == 0) return "failed";
  std::string text = format_mean_std({r.mean, r.std, r.runs}) + r.marker;
  if (r.failed > 0) text += " [" + std::to_string(r.failed) + " failed]";
  return text;
}

}  // namespace

std::string report_text(Task task, const std::vector<ReportRow>& rows) {
  const std::vector<std::string> row_names = ordered_unique(rows, false);
  const std::vector<std::string> columns = ordered_unique(rows, true);
  std::vector<std::vector<std::string>> grid;
  grid.push_back({task == Task::Extract ? "scheme" : "strategy"});
  grid.front().insert(grid.front().end(), columns.begin(), columns.end());
  for (const std::string& name : row_names) {
    std::vector<std::string> line = {name};
    for (const std::string& column : columns) {
      const auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
        return r.row == name && r.column == column;
      });
      line.push_back(it == rows.end() ? "-" : cell_text(*it));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], line[c].size());
  }
  std::ostringstream out;
  out << "# " << task_name(task) << ": " << primary_metric(task)
      << " x100, mean (std) over seeds; +/- vs original\n";
  if (task == Task::Classify) out << "# " << kMacroF1Note << '\n';
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      out << std::left << std::setw(static_cast<int>(widths[c])) << line[c];
      out << (c + 1 < line.size() ? "  " : "");
    }
    out << '\n';
  }
  std::string text = out.str();
  // Trailing padding on the last column is not part of the layout.
  std::string trimmed;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    line.erase(line.find_last_not_of(' ') + 1);
    trimmed += line + '\n';
  }
  return trimmed;
}

Json report_json(Task task, const std::vector<ReportRow>& rows) {
  Json j = {{"task", task_name(task)}, {"metric", primary_metric(task)}, {"rows", Json::array()}};
  if (task == Task::Classify) j["note"] = kMacroF1Note;
  for (const ReportRow& r : rows) {
    j["rows"].push_back({{"row", r.row},
                         {"column", r.column},
                         {"runs", r.runs},
                         {"failed", r.failed},
                         {"mean", r.mean},
                         {"std", r.std},
                         {"marker", r.marker},
                         {"text", cell_text(r)}});
  }
  return j;
}

std::string report_matrix_csv(const std::vector<ReportRow>& rows) {
  const std::vector<std::string> row_names = ordered_unique(rows, false);
  const std::vector<std::string> columns = ordered_unique(rows, true);
  std::ostringstream out;
  out << "row";
  for (const std::string& c : columns) out << ',' << c;
  out << '\n';
  for (const std::string& name : row_names) {
    out << name;
    for (const std::string& column : columns) {
      const auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
        return r.row == name && r.column == column;
      });
      out << ',';
      if (it != rows.end() && it->runs > 0) {
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%.4f", it->mean);
        out << buffer;
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace fgs::tools
