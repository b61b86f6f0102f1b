#include "fgs_tools/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "fgs/classifier.hpp"
#include "fgs/conll.hpp"
#include "fgs/corpus_stats.hpp"
#include "fgs/error.hpp"
#include "fgs/eval.hpp"
#include "fgs/model_io.hpp"
#include "fgs/tagger.hpp"
#include "fgs_tools/adapters.hpp"
#include "fgs_tools/experiment.hpp"

namespace fgs::tools {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool force = false;
  std::string format = "text";

  bool json() const { return format == "json"; }
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

TagScheme scheme_from_text(const std::string& text) {
  std::string strategy = text;
  std::string mode = "targeted";
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    strategy = text.substr(0, colon);
    mode = text.substr(colon + 1);
  }
  const auto s = strategy_from_string(strategy);
  const auto m = task_mode_from_string(mode);
  if (!s || !m) throw ValidationError("unknown scheme \"" + text + "\"");
  return {*s, *m};
}

// convert ---------------------------------------------------------------

void cmd_convert(const fs::path& input, const std::string& adapter, const fs::path& output,
                 const GlobalOptions& g, std::ostream& out) {
  const Corpus corpus = convert_with(adapter, input);
  save_corpus(corpus, output);
  std::size_t opinions = 0;
  for (const Sentence& s : corpus.sentences) opinions += s.opinions.size();
  if (g.json()) {
    out << Json{{"output", output.string()},
                {"sentences", corpus.sentences.size()},
                {"opinions", opinions},
                {"validation_errors", 0}}
               .dump(2)
        << '\n';
  } else {
    out << "wrote " << output.string() << ": " << corpus.sentences.size() << " sentences, "
        << opinions << " opinions, 0 validation errors\n";
  }
}

// stats -----------------------------------------------------------------

void cmd_stats(const std::vector<fs::path>& paths, bool overlap, const GlobalOptions& g,
               std::ostream& out) {
  std::vector<Corpus> corpora;
  for (const fs::path& p : paths) corpora.push_back(load_corpus(p));
  if (overlap && corpora.size() != 3) {
    throw ValidationError("--overlap needs exactly three corpora (train dev test)");
  }
  auto name_of = [&](std::size_t i) {
    return corpora[i].name.empty() ? paths[i].stem().string() : corpora[i].name;
  };
  if (g.json()) {
    Json j = {{"stats", Json::array()}};
    for (std::size_t i = 0; i < corpora.size(); ++i) {
      Json row = to_json(compute_stats(corpora[i]));
      row["name"] = name_of(i);
      j["stats"].push_back(std::move(row));
    }
    if (overlap) j["overlap"] = to_json(compute_overlap(corpora[0], corpora[1], corpora[2]));
    out << j.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    out << stats_table(name_of(i), compute_stats(corpora[i]));
  }
  if (overlap) {
    out << overlap_table(name_of(0), compute_overlap(corpora[0], corpora[1], corpora[2]));
  }
}

// run -------------------------------------------------------------------

void cmd_run(const fs::path& spec_path, const GlobalOptions& g, std::ostream& out,
             std::ostream& err) {
  ExperimentSpec spec = load_spec(spec_path);
  if (g.seed) spec.seeds = {*g.seed};
  const SweepResult result = run_experiment(spec, {g.jobs, g.force, &err});
  if (g.json()) {
    Json j = report_json(spec.task, build_report(spec.task, result.records));
    j["cells"] = result.records.size();
    j["executed"] = result.executed;
    j["cached"] = result.cached;
    j["failed"] = result.failed;
    j["output"] = spec.output.string();
    out << j.dump(2) << '\n';
  } else {
    out << report_text(spec.task, build_report(spec.task, result.records));
    out << result.records.size() << " cells: " << result.executed << " executed, "
        << result.cached << " cached, " << result.failed << " failed; output in "
        << spec.output.string() << '\n';
  }
  if (result.failed > 0) throw Error(std::to_string(result.failed) + " cell(s) failed");
}

// predict ---------------------------------------------------------------

std::shared_ptr<const EmbeddingProvider> provider_for(const fs::path& model_path,
                                                      std::size_t model_dimension,
                                                      const std::string& embedding_file) {
  std::shared_ptr<const EmbeddingProvider> provider;
  if (!embedding_file.empty()) {
    provider = FileBackedProvider::open(embedding_file);
  } else {
    const Json sidecar = load_sidecar(model_path);
    if (!sidecar.contains("embedding")) {
      throw ValidationError(model_path.string() +
                            ": no embedding description in the model sidecar; pass --embedding");
    }
    provider = make_provider(sidecar["embedding"]);
  }
  if (provider->dimension() != model_dimension) {
    throw ValidationError("embedding dimension mismatch: model " + model_path.string() +
                          " expects d=" + std::to_string(model_dimension) + ", embeddings " +
                          (embedding_file.empty() ? std::string("from the sidecar")
                                                  : embedding_file) +
                          " have d=" + std::to_string(provider->dimension()));
  }
  return provider;
}

void predict_tagger(const TaggerModel& model, const EmbeddingProvider& provider,
                    const Corpus& corpus, const fs::path& output, const GlobalOptions& g) {
  std::vector<ConllSentence> predictions;
  for (const Sentence& s : corpus.sentences) {
    predictions.push_back({s.sent_id, s.tokens, predict_tags(model, s, provider)});
  }
  if (!g.json()) {
    write_text(output, to_conll(predictions));
    return;
  }
  Json j = Json::array();
  for (const ConllSentence& p : predictions) {
    j.push_back({{"sent_id", p.sent_id}, {"tokens", p.tokens}, {"tags", to_strings(p.tags)}});
  }
  write_text(output, j.dump() + "\n");
}

void predict_classifier(const ClassifierModel& model, const EmbeddingProvider& provider,
                        Corpus corpus, const fs::path& output, const GlobalOptions& g) {
  std::string tsv;
  for (Sentence& s : corpus.sentences) {
    for (Opinion& o : s.opinions) {
      if (o.target.empty()) continue;
      const PolarityPrediction p = predict_polarity(model, s, o.target, provider);
      o.polarity = p.label;
      tsv += s.sent_id + '\t' + classifier_key(s.sent_id, o.target) + '\t' +
             surface_form(s, o.target) + '\t' + std::string(to_string(p.label)) + '\n';
    }
  }
  write_text(output, g.json() ? serialize_corpus(corpus) : tsv);
}

void cmd_predict(const fs::path& model_path, const fs::path& corpus_path, const fs::path& output,
                 const std::string& embedding_file, const GlobalOptions& g, std::ostream& out) {
  const AnyModel any = load_model(model_path);
  const Corpus corpus = load_corpus(corpus_path);
  if (const auto* tagger = std::get_if<TaggerModel>(&any)) {
    const auto provider = provider_for(model_path, tagger->dimension(), embedding_file);
    predict_tagger(*tagger, *provider, corpus, output, g);
  } else {
    const auto& classifier = std::get<ClassifierModel>(any);
    const std::size_t d = classifier.strategy == PoolingStrategy::MaxMM
                              ? classifier.input_dimension() / 3
                              : classifier.input_dimension();
    const auto provider = provider_for(model_path, d, embedding_file);
    predict_classifier(classifier, *provider, corpus, output, g);
  }
  out << "wrote " << output.string() << ": " << corpus.sentences.size() << " sentences\n";
}

// eval ------------------------------------------------------------------

void eval_extraction(const Corpus& gold, const fs::path& pred_path, const TagScheme& scheme,
                     const GlobalOptions& g, std::ostream& out) {
  const std::vector<ConllSentence> predicted = from_conll(read_text(pred_path), scheme);
  std::map<std::string, const ConllSentence*> by_id;
  for (const ConllSentence& p : predicted) by_id[p.sent_id] = &p;
  std::vector<TagSequence> gold_tags;
  std::vector<TagSequence> pred_tags;
  for (const Sentence& s : gold.sentences) {
    const auto it = by_id.find(s.sent_id);
    if (it == by_id.end()) {
      throw ValidationError("no prediction for sent_id \"" + s.sent_id + "\" in " +
                            pred_path.string());
    }
    gold_tags.push_back(encode(s, scheme));
    pred_tags.push_back(it->second->tags);
  }
  std::vector<Element> elements;
  for (const Element e : {Element::Holder, Element::Target, Element::Expression}) {
    const std::vector<Tag> labels = label_inventory(scheme);
    if (std::any_of(labels.begin(), labels.end(), [&](const Tag& t) { return t.element == e; })) {
      elements.push_back(e);
    }
  }
  const TokenF1Report report = token_f1_report(gold_tags, pred_tags, elements);
  if (g.json()) {
    out << to_json(report).dump(2) << '\n';
    return;
  }
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s\n", "element", "precision", "recall", "f1");
  out << line;
  for (const auto& [element, counts] : report.elements) {
    std::snprintf(line, sizeof line, "%-10s %9.1f %9.1f %9.1f\n",
                  std::string(to_string(element)).c_str(), 100 * counts.precision(),
                  100 * counts.recall(), 100 * counts.f1());
    out << line;
  }
}

void eval_classification(const Corpus& gold, const Corpus& predicted, const GlobalOptions& g,
                         std::ostream& out) {
  std::map<std::string, Polarity> by_key;
  for (const Sentence& s : predicted.sentences) {
    for (const Opinion& o : s.opinions) by_key[classifier_key(s.sent_id, o.target)] = o.polarity;
  }
  std::vector<Polarity> gold_labels;
  std::vector<Polarity> pred_labels;
  for (const Sentence& s : gold.sentences) {
    for (const Opinion& o : s.opinions) {
      if (o.target.empty()) continue;
      const std::string key = classifier_key(s.sent_id, o.target);
      const auto it = by_key.find(key);
      if (it == by_key.end()) throw ValidationError("no prediction for target " + key);
      gold_labels.push_back(o.polarity);
      pred_labels.push_back(it->second);
    }
  }
  const MacroF1Report report = macro_f1(gold_labels, pred_labels);
  if (g.json()) {
    out << to_json(report).dump(2) << '\n';
    return;
  }
  char line[96];
  std::snprintf(line, sizeof line, "macro F1 %.1f over %zu targets (%zu conflict discarded)\n",
                100 * report.macro_f1, report.scored, report.discarded);
  out << line << "# " << kMacroF1Note << '\n';
}

void cmd_eval(const fs::path& gold_path, const fs::path& pred_path, const std::string& scheme,
              const GlobalOptions& g, std::ostream& out) {
  const Corpus gold = load_corpus(gold_path);
  if (pred_path.extension() == ".json") {
    eval_classification(gold, load_corpus(pred_path), g, out);
  } else {
    eval_extraction(gold, pred_path, scheme_from_text(scheme), g, out);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Targeted sentiment toolkit: corpora, extraction, classification, experiments",
               "fgs"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Run every experiment cell with this single seed");
  app.add_option("--jobs", g.jobs, "Cells trained in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--force", g.force, "Re-run cells that already have records");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));

  std::string input;
  std::string output;
  std::string adapter = "json";
  auto* convert = app.add_subcommand("convert", "Convert a source file to canonical JSON");
  convert->add_option("input", input, "Source file")->required();
  convert->add_option("output", output, "Canonical JSON output")->required();
  convert->add_option("--adapter", adapter, "Source format: json, conll-targeted");

  std::vector<std::string> corpora;
  bool overlap = false;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("corpora", corpora, "Corpus files")->required();
  stats->add_flag("--overlap", overlap, "Target overlap report for train dev test");

  std::string spec;
  auto* run = app.add_subcommand("run", "Run an experiment sweep");
  run->add_option("spec", spec, "Experiment spec JSON")->required();

  std::string model;
  std::string corpus;
  std::string embedding;
  auto* predict = app.add_subcommand("predict", "Tag or classify a corpus with a saved model");
  predict->add_option("model", model, "Model file")->required();
  predict->add_option("corpus", corpus, "Corpus JSON")->required();
  predict->add_option("output", output, "Predictions (CoNLL/TSV, or JSON with --format json)")
      ->required();
  predict->add_option("--embedding", embedding, "Embedding file replacing the sidecar provider");

  std::string gold;
  std::string pred;
  std::string scheme = "Target";
  auto* eval = app.add_subcommand("eval", "Score predictions against a gold corpus");
  eval->add_option("gold", gold, "Gold corpus JSON")->required();
  eval->add_option("predictions", pred, "Predicted CoNLL (extraction) or JSON (classification)")
      ->required();
  eval->add_option("--scheme", scheme, "Scheme of CoNLL predictions, e.g. JointPolarity:full");

  for (CLI::App* sub : {convert, stats, run, predict, eval}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fgs: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*convert) cmd_convert(input, adapter, output, g, out);
    if (*stats) {
      std::vector<fs::path> paths(corpora.begin(), corpora.end());
      cmd_stats(paths, overlap, g, out);
    }
    if (*run) cmd_run(spec, g, out, err);
    if (*predict) cmd_predict(model, corpus, output, embedding, g, out);
    if (*eval) cmd_eval(gold, pred, scheme, g, out);
  } catch (const ValidationError& e) {
    err << "fgs: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "fgs: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace fgs::tools
