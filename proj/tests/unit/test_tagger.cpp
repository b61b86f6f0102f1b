#include <gtest/gtest.h>

#include "fgs/error.hpp"
#include "fgs/eval.hpp"
#include "fgs/tagger.hpp"
#include "synthetic.hpp"

namespace fgs {
namespace {

const TagScheme kTarget{Strategy::Target, TaskMode::Targeted};

Sentence plain(std::vector<std::string> tokens, std::string id = "s") {
  Sentence s;
  s.sent_id = std::move(id);
  s.tokens = std::move(tokens);
  return s;
}

struct PivotFixture {
  HashedStaticProvider provider{{64, 1, 0}};
  TrainConfig config;
  TaggerModel model;

  PivotFixture() {
    config.epochs = 10;
    model = train_tagger(testing::pivot_corpus(400, 1), kTarget, AugmentMode::Original, provider,
                         config);
  }
};

const PivotFixture& pivot() {
  static const PivotFixture fixture;
  return fixture;
}

TEST(Tagger, LearnsThePivotRule) {
  const PivotFixture& f = pivot();
  const Corpus held_out = testing::pivot_corpus(200, 2);
  std::vector<TagSequence> gold;
  std::vector<TagSequence> predicted;
  for (const Sentence& s : held_out.sentences) {
    gold.push_back(encode(s, kTarget));
    predicted.push_back(predict_tags(f.model, s, f.provider));
  }
  EXPECT_EQ(token_f1(gold, predicted, Element::Target).f1(), 1.0);
  EXPECT_EQ(predicted, gold);
}

TEST(Tagger, PivotExample) {
  const PivotFixture& f = pivot();
  EXPECT_EQ(to_strings(predict_tags(f.model, plain({"a", "PIVOT", "b"}), f.provider)),
            (std::vector<std::string>{"O", "B-targ", "O"}));
}

TEST(Tagger, DeterministicForFixedSeed) {
  const PivotFixture& f = pivot();
  const TaggerModel again = train_tagger(testing::pivot_corpus(400, 1), kTarget,
                                         AugmentMode::Original, f.provider, f.config);
  EXPECT_EQ(again, f.model);
  EXPECT_EQ(again.emissions.data(), f.model.emissions.data());
}

TEST(Tagger, DevSelectionRecordsHistory) {
  const HashedStaticProvider provider({32, 1, 0});
  const Corpus dev = testing::pivot_corpus(40, 9);
  std::vector<double> history;
  TaggerTrainOptions options;
  options.dev = &dev;
  options.dev_history = &history;
  TrainConfig config;
  config.epochs = 4;
  train_tagger(testing::pivot_corpus(60, 8), kTarget, AugmentMode::Original, provider, config,
               options);
  EXPECT_EQ(history.size(), 4u);
}

TEST(Tagger, ZeroModelPredictsOutside) {
  const HashedStaticProvider provider({8, 0, 1});
  const TaggerModel zero =
      TaggerModel::zeros({Strategy::JointPolarity, TaskMode::Full}, 8, AugmentMode::Full);
  const Sentence s = testing::umuc_sentence();
  EXPECT_EQ(predict_tags(zero, s, provider), TagSequence(s.tokens.size()));
}

TEST(Tagger, TokensPastTheLimitAreOutside) {
  const PivotFixture& f = pivot();
  TaggerModel short_model = f.model;
  short_model.max_sequence_length = 2;
  const TagSequence tags =
      predict_tags(short_model, plain({"a", "PIVOT", "b", "PIVOT"}), f.provider);
  EXPECT_EQ(to_strings(tags), (std::vector<std::string>{"O", "B-targ", "O", "O"}));
}

TEST(Tagger, InstancesAlignWithAugmentedTokens) {
  const Sentence s = testing::umuc_sentence();
  const TaggerInstance instance =
      make_tagger_instance(s, {Strategy::Joint, TaskMode::Full}, AugmentMode::Full);
  EXPECT_EQ(instance.key, s.sent_id);
  EXPECT_EQ(instance.tokens.size(), s.tokens.size() + 6);
  EXPECT_EQ(instance.labels.size(), instance.tokens.size());
  EXPECT_EQ(instance.original_index.size(), instance.tokens.size());
  for (std::size_t i = 0; i < instance.tokens.size(); ++i) {
    if (instance.original_index[i] >= 0) {
      EXPECT_EQ(instance.tokens[i], s.tokens[instance.original_index[i]]);
    } else {
      EXPECT_EQ(instance.labels[i], 0);
    }
  }
}

TEST(Tagger, Errors) {
  const HashedStaticProvider provider({8, 0, 1});
  TrainConfig config;
  config.epochs = 0;
  EXPECT_THROW(train_tagger(testing::pivot_corpus(5, 1), kTarget, AugmentMode::Original,
                            provider, config),
               ValidationError);
  EXPECT_THROW(train_tagger(Corpus{}, kTarget, AugmentMode::Original, provider, TrainConfig{}),
               ValidationError);
  const TaggerModel wide = TaggerModel::zeros(kTarget, 16);
  EXPECT_THROW(predict_tags(wide, plain({"a"}), provider), ValidationError);
  EXPECT_THROW(wide.label_index(Tag::parse("B-exp")), ValidationError);
}

}  // namespace
}  // namespace fgs
