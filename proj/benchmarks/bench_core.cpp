#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fgs/classifier.hpp"
#include "fgs/embedding.hpp"
#include "fgs/rng.hpp"
#include "fgs/tagger.hpp"
#include "fgs/viterbi.hpp"

namespace fgs {
namespace {

void BM_Viterbi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<Tag> labels = label_inventory({Strategy::JointPolarity, TaskMode::Full});
  Rng rng(1);
  Matrix e(n, labels.size());
  Matrix t(labels.size(), labels.size());
  for (double& x : e.data()) x = rng.normal();
  for (double& x : t.data()) x = rng.normal();
  const TransitionMask mask = TransitionMask::bio(labels);
  for (auto _ : state) benchmark::DoNotOptimize(viterbi(e, t, mask));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Viterbi)->Arg(16)->Arg(64)->Arg(128);

std::vector<std::string> sentence(std::size_t n) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(i % 37));
  return tokens;
}

void BM_HashedEmbed(benchmark::State& state) {
  const HashedStaticProvider provider({static_cast<std::size_t>(state.range(0)), 1, 1});
  const std::vector<std::string> tokens = sentence(40);
  for (auto _ : state) benchmark::DoNotOptimize(provider.embed(tokens, "k"));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tokens.size()));
}
BENCHMARK(BM_HashedEmbed)->Arg(64)->Arg(256);

Corpus pivot_like(std::size_t sentences) {
  Corpus c;
  Rng rng(3);
  for (std::size_t i = 0; i < sentences; ++i) {
    Sentence s;
    s.sent_id = "s" + std::to_string(i);
    s.tokens = sentence(8 + rng.below(12));
    const int at = static_cast<int>(rng.below(s.tokens.size()));
    s.tokens[at] = "PIVOT";
    Opinion o;
    o.target = {{at, at + 1}};
    s.opinions.push_back(o);
    c.sentences.push_back(s);
  }
  return c;
}

void BM_TaggerEpoch(benchmark::State& state) {
  const HashedStaticProvider provider({64, 1, 0});
  const Corpus corpus = pivot_like(static_cast<std::size_t>(state.range(0)));
  TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_tagger(corpus, {Strategy::Target, TaskMode::Targeted},
                                          AugmentMode::Original, provider, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TaggerEpoch)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fgs

BENCHMARK_MAIN();
