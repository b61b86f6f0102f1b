#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fgs/conll.hpp"
#include "fgs/corpus_stats.hpp"
#include "fgs/model_io.hpp"
#include "fgs/tagger.hpp"
#include "fgs_tools/cli.hpp"
#include "synthetic.hpp"
#include "test_paths.hpp"

namespace fgs::tools {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const Json kPivotEmbedding = {{"kind", "hashed-static"}, {"dimension", 64}, {"seed", 1}, {"window", 0}};

fs::path save_pivot_model(const fs::path& dir) {
  const HashedStaticProvider provider({64, 1, 0});
  TrainConfig config;
  config.epochs = 10;
  const TaggerModel model =
      train_tagger(testing::pivot_corpus(400, 1), {Strategy::Target, TaskMode::Targeted},
                   AugmentMode::Original, provider, config);
  save_model(model, dir / "pivot.fgsm", Json{{"embedding", kPivotEmbedding}});
  return dir / "pivot.fgsm";
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"stats"}).code, kExitUsage);
  EXPECT_EQ(cli({"--format", "xml", "stats", "a.json"}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  const Outcome help = cli({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("convert"), std::string::npos);
}

TEST(Cli, ConvertTargetedConll) {
  const fs::path dir = testing::scratch_dir("cli_convert");
  const Outcome r = cli({"convert", "--adapter", "conll-targeted",
                         testing::data_path("targeted_polarity.conll").string(),
                         (dir / "out.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("2 sentences, 3 opinions, 0 validation errors"), std::string::npos);
  const Corpus c = load_corpus(dir / "out.json");
  ASSERT_EQ(c.sentences.size(), 2u);
  EXPECT_EQ(c.sentences[0].sent_id, "r-1");
  ASSERT_EQ(c.sentences[1].opinions.size(), 2u);
  EXPECT_EQ(c.sentences[1].opinions[1].target, (std::vector<Span>{{2, 4}}));
  EXPECT_EQ(c.sentences[1].opinions[1].polarity, Polarity::Neutral);
  EXPECT_EQ(c.sentences[1].opinions[0].polarity, Polarity::Negative);

  const Outcome plain = cli({"--format", "json", "convert", "--adapter", "conll-targeted",
                             testing::data_path("targeted.conll").string(),
                             (dir / "plain.json").string()});
  ASSERT_EQ(plain.code, kExitOk) << plain.err;
  EXPECT_EQ(Json::parse(plain.out).at("validation_errors"), 0);
}

TEST(Cli, ConvertIdentityIsByteStable) {
  const fs::path dir = testing::scratch_dir("cli_identity");
  ASSERT_EQ(cli({"convert", testing::data_path("umuc.json").string(), (dir / "a.json").string()})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"convert", (dir / "a.json").string(), (dir / "b.json").string()}).code, kExitOk);
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(load_corpus(dir / "a.json"), load_corpus(testing::data_path("umuc.json")));
}

TEST(Cli, ConvertErrors) {
  const fs::path dir = testing::scratch_dir("cli_convert_errors");
  spit(dir / "bad.conll", "# sent_id = x\nword B-nonsense\n\n");
  const Outcome corrupt = cli({"convert", "--adapter", "conll-targeted",
                               (dir / "bad.conll").string(), (dir / "o.json").string()});
  EXPECT_EQ(corrupt.code, kExitValidation);
  EXPECT_FALSE(corrupt.err.empty());
  EXPECT_FALSE(fs::exists(dir / "o.json"));

  spit(dir / "bad.json", "{\"sentences\": [");
  EXPECT_EQ(cli({"convert", (dir / "bad.json").string(), (dir / "o.json").string()}).code,
            kExitValidation);
  const Outcome adapter = cli({"convert", "--adapter", "xml", (dir / "bad.json").string(),
                               (dir / "o.json").string()});
  EXPECT_EQ(adapter.code, kExitValidation);
  EXPECT_NE(adapter.err.find("unknown adapter"), std::string::npos);
  EXPECT_EQ(cli({"convert", (dir / "absent.json").string(), (dir / "o.json").string()}).code,
            kExitRuntime);
}

TEST(Cli, StatsOnFixture) {
  const fs::path fixture = testing::data_path("umuc.json");
  const Outcome text = cli({"stats", fixture.string()});
  ASSERT_EQ(text.code, kExitOk) << text.err;
  EXPECT_EQ(text.out, stats_table("umuc", compute_stats(load_corpus(fixture))));

  const Outcome json = cli({"--format", "json", "stats", fixture.string()});
  ASSERT_EQ(json.code, kExitOk);
  Json want = to_json(compute_stats(load_corpus(fixture)));
  want["name"] = "umuc";
  EXPECT_EQ(Json::parse(json.out).at("stats").at(0), want);
}

TEST(Cli, StatsEmptyCorpusAndOverlap) {
  const fs::path dir = testing::scratch_dir("cli_stats");
  save_corpus(Corpus{"empty", Split::Unsplit, {}, Json::object()}, dir / "empty.json");
  const Outcome r = cli({"--format", "json", "stats", (dir / "empty.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Json::parse(r.out).at("stats").at(0).at("sentences"), 0);

  const std::string f = testing::data_path("umuc.json").string();
  EXPECT_EQ(cli({"stats", "--overlap", f, f}).code, kExitValidation);
  const Outcome overlap = cli({"--format", "json", "stats", "--overlap", f, f, f});
  ASSERT_EQ(overlap.code, kExitOk) << overlap.err;
  EXPECT_EQ(Json::parse(overlap.out).at("overlap").at("overlap").at("train-test"), 100.0);
}

TEST(Cli, PredictAndEvalPivotModel) {
  const fs::path dir = testing::scratch_dir("cli_predict");
  const fs::path model = save_pivot_model(dir);
  const Corpus held_out = testing::pivot_corpus(100, 5);
  save_corpus(held_out, dir / "test.json");

  const Outcome r =
      cli({"predict", model.string(), (dir / "test.json").string(), (dir / "pred.conll").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const TagScheme scheme{Strategy::Target, TaskMode::Targeted};
  const auto predicted = from_conll(slurp(dir / "pred.conll"), scheme);
  ASSERT_EQ(predicted.size(), held_out.sentences.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    EXPECT_EQ(predicted[i].tags, encode(held_out.sentences[i], scheme));
  }

  const Outcome eval = cli({"--format", "json", "eval", (dir / "test.json").string(),
                            (dir / "pred.conll").string(), "--scheme", "Target"});
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  EXPECT_NE(eval.out.find("\"f1\": 1.0"), std::string::npos) << eval.out;

  const Outcome text = cli({"eval", (dir / "test.json").string(), (dir / "pred.conll").string()});
  ASSERT_EQ(text.code, kExitOk);
  EXPECT_NE(text.out.find("100.0"), std::string::npos);
}

TEST(Cli, PredictEmptyCorpusAndDimensionMismatch) {
  const fs::path dir = testing::scratch_dir("cli_predict_errors");
  const fs::path model = save_pivot_model(dir);
  save_corpus(Corpus{}, dir / "empty.json");
  const Outcome empty =
      cli({"predict", model.string(), (dir / "empty.json").string(), (dir / "p.conll").string()});
  EXPECT_EQ(empty.code, kExitOk) << empty.err;
  EXPECT_EQ(slurp(dir / "p.conll"), "");

  const std::vector<EmbeddingRecord> records = {{"x", {}, std::vector<float>(8, 0.0f)}};
  write_embedding_file(dir / "narrow.bin", 8, records);
  const Outcome mismatch = cli({"predict", model.string(), (dir / "empty.json").string(),
                                (dir / "p.conll").string(), "--embedding",
                                (dir / "narrow.bin").string()});
  EXPECT_EQ(mismatch.code, kExitValidation);
  EXPECT_NE(mismatch.err.find("expects d=64"), std::string::npos) << mismatch.err;
  EXPECT_NE(mismatch.err.find("have d=8"), std::string::npos) << mismatch.err;

  fs::remove(sidecar_path(model));
  EXPECT_EQ(cli({"predict", model.string(), (dir / "empty.json").string(),
                 (dir / "p.conll").string()})
                .code,
            kExitValidation);
}

TEST(Cli, PredictAndEvalClassifier) {
  const fs::path dir = testing::scratch_dir("cli_classifier");
  const HashedStaticProvider provider({64, 1, 1});
  const Corpus train = testing::separable_corpus(200, 1);
  TrainConfig config;
  config.epochs = 20;
  config.learning_rate = 1.0;
  config.weight_decay = 0.0;
  const ClassifierModel model = train_classifier(classification_examples(train),
                                                 PoolingStrategy::MaxMM, AugmentMode::Original,
                                                 provider, config);
  save_model(model, dir / "c.fgsm", Json{{"embedding", provider.describe()}});
  save_corpus(testing::separable_corpus(50, 2), dir / "test.json");

  const Outcome r = cli({"--format", "json", "predict", (dir / "c.fgsm").string(),
                         (dir / "test.json").string(), (dir / "pred.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Outcome tsv = cli({"predict", (dir / "c.fgsm").string(), (dir / "test.json").string(),
                           (dir / "pred.tsv").string()});
  ASSERT_EQ(tsv.code, kExitOk) << tsv.err;
  EXPECT_NE(slurp(dir / "pred.tsv").find("sep-2-0\tsep-2-0@"), std::string::npos);

  const Outcome eval = cli({"--format", "json", "eval", (dir / "test.json").string(),
                            (dir / "pred.json").string()});
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  EXPECT_GE(Json::parse(eval.out).at("macro_f1").get<double>(), 0.9);
}

}  // namespace
}  // namespace fgs::tools
