#include <gtest/gtest.h>

#include "fgs/error.hpp"
#include "fgs/tagscheme.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace fgs {
namespace {

const TagScheme kTarget{Strategy::Target, TaskMode::Targeted};
const TagScheme kJointFull{Strategy::Joint, TaskMode::Full};
const TagScheme kPolarTargeted{Strategy::JointPolarity, TaskMode::Targeted};
const TagScheme kPolarFull{Strategy::JointPolarity, TaskMode::Full};

TagSequence tags(const std::vector<std::string>& labels) {
  TagSequence out;
  for (const auto& l : labels) out.push_back(Tag::parse(l));
  return out;
}

TEST(LabelInventory, Sizes) {
  EXPECT_EQ(label_inventory(kTarget).size(), 3u);
  EXPECT_EQ(label_inventory({Strategy::Target, TaskMode::Full}).size(), 3u);
  EXPECT_EQ(label_inventory(kJointFull).size(), 7u);
  EXPECT_EQ(label_inventory(kPolarTargeted).size(), 7u);
  EXPECT_EQ(label_inventory(kPolarFull).size(), 19u);
}

TEST(LabelInventory, Order) {
  EXPECT_EQ(to_strings(label_inventory(kTarget)),
            (std::vector<std::string>{"O", "B-targ", "I-targ"}));
  EXPECT_EQ(to_strings(label_inventory(kJointFull)),
            (std::vector<std::string>{"O", "B-holder", "B-targ", "B-exp", "I-holder", "I-targ",
                                      "I-exp"}));
  EXPECT_EQ(to_strings(label_inventory(kPolarTargeted)),
            (std::vector<std::string>{"O", "B-targ-positive", "B-targ-neutral",
                                      "B-targ-negative", "I-targ-positive", "I-targ-neutral",
                                      "I-targ-negative"}));
  const auto full = to_strings(label_inventory(kPolarFull));
  EXPECT_EQ(full.front(), "O");
  EXPECT_EQ(full[1], "B-holder-positive");
  EXPECT_EQ(full[9], "B-exp-negative");
  EXPECT_EQ(full[10], "I-holder-positive");
  EXPECT_EQ(full.back(), "I-exp-negative");
}

TEST(Tag, SurfaceForms) {
  for (const TagScheme& scheme : testing::all_schemes()) {
    for (const Tag& t : label_inventory(scheme)) {
      EXPECT_EQ(Tag::parse(t.str()), t);
      EXPECT_TRUE(in_inventory(t, scheme));
    }
  }
  EXPECT_THROW(Tag::parse("B-targ-conflict"), ValidationError);
  EXPECT_THROW(Tag::parse("B-target"), ValidationError);
  EXPECT_THROW(Tag::parse("O-targ"), ValidationError);
  EXPECT_THROW(Tag::parse(""), ValidationError);
  EXPECT_THROW(Tag::parse("B-targ-positive-x"), ValidationError);
}

TEST(Encode, UmucJointFull) {
  EXPECT_EQ(to_strings(encode(testing::umuc_sentence(), kJointFull)),
            (std::vector<std::string>{"O", "O", "B-holder", "I-holder", "O", "B-targ", "B-exp",
                                      "I-exp", "O", "B-exp", "I-exp", "B-targ", "O"}));
}

TEST(Encode, UmucPolarTargeted) {
  const auto got = to_strings(encode(testing::umuc_sentence(), kPolarTargeted));
  std::vector<std::string> want(13, "O");
  want[5] = "B-targ-positive";
  want[11] = "B-targ-negative";
  EXPECT_EQ(got, want);
}

TEST(Encode, NoOpinionsAllOutside) {
  Sentence s;
  s.tokens = {"a", "b", "c"};
  for (const TagScheme& scheme : testing::all_schemes()) {
    EXPECT_EQ(encode(s, scheme), TagSequence(3));
  }
}

TEST(Encode, HolderCarriesPolarityUnderPolarFull) {
  const auto got = to_strings(encode(testing::umuc_sentence(), kPolarFull));
  EXPECT_EQ(got[2], "B-holder-positive");
  EXPECT_EQ(got[3], "I-holder-positive");
  EXPECT_EQ(got[9], "B-exp-negative");
}

TEST(Encode, ConflictSkippedOnlyUnderPolarity) {
  Sentence s = testing::umuc_sentence();
  s.opinions[1].polarity = Polarity::Conflict;
  EXPECT_EQ(encode(s, kPolarTargeted)[11], Tag::outside());
  EXPECT_EQ(encode(s, kTarget)[11].str(), "B-targ");
}

TEST(Encode, OverlapPriority) {
  Sentence s;
  s.sent_id = "ov";
  s.tokens = {"a", "b", "c", "d"};
  Opinion first;
  first.target = {{1, 3}};
  first.polarity = Polarity::Positive;
  Opinion second;
  second.target = {{2, 4}};
  second.expression = {{0, 2}};
  second.polarity = Polarity::Negative;
  s.opinions = {first, second};
  // The earlier target wins; the later target and the expression touching it
  // are dropped whole.
  EXPECT_EQ(to_strings(encode(s, kJointFull)),
            (std::vector<std::string>{"O", "B-targ", "I-targ", "O"}));
  EXPECT_THROW(encode(s, kJointFull, OverlapPolicy::Strict), ValidationError);
  try {
    encode(s, kJointFull, OverlapPolicy::Strict);
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("token 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("opinion 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("opinion 1"), std::string::npos) << msg;
  }
}

TEST(Encode, TargetBeatsExpressionBeatsHolder) {
  Sentence s;
  s.sent_id = "x";
  s.tokens = {"a", "b", "c"};
  Opinion o;
  o.holder = {{0, 3}};
  o.target = {{2, 3}};
  o.expression = {{0, 1}};
  o.polarity = Polarity::Neutral;
  s.opinions = {o};
  EXPECT_EQ(to_strings(encode(s, kJointFull)), (std::vector<std::string>{"B-exp", "O", "B-targ"}));
}

TEST(Encode, SharedSpanIsNotAConflict) {
  Sentence s;
  s.sent_id = "x";
  s.tokens = {"a", "b"};
  Opinion o;
  o.target = {{0, 1}};
  o.polarity = Polarity::Positive;
  s.opinions = {o, o};
  EXPECT_NO_THROW(encode(s, kPolarFull, OverlapPolicy::Strict));
  s.opinions[1].polarity = Polarity::Negative;
  EXPECT_THROW(encode(s, kPolarFull, OverlapPolicy::Strict), ValidationError);
  EXPECT_NO_THROW(encode(s, kJointFull, OverlapPolicy::Strict));
  EXPECT_EQ(encode(s, kPolarFull)[0].str(), "B-targ-positive");
}

TEST(Encode, DiscontinuousSpansAreSeparateRuns) {
  Sentence s;
  s.sent_id = "x";
  s.tokens = {"a", "b", "c"};
  Opinion o;
  o.target = {{0, 1}, {1, 3}};
  s.opinions = {o};
  EXPECT_EQ(to_strings(encode(s, kTarget)), (std::vector<std::string>{"B-targ", "B-targ", "I-targ"}));
}

TEST(Decode, Examples) {
  EXPECT_EQ(decode(tags({"B-targ", "I-targ", "O"}), kTarget),
            (std::vector<LabeledSpan>{{Element::Target, {0, 2}, std::nullopt}}));
  EXPECT_TRUE(decode(tags({"O", "O"}), kTarget).empty());
  EXPECT_EQ(decode(tags({"B-targ-positive", "B-targ-negative"}), kPolarTargeted),
            (std::vector<LabeledSpan>{{Element::Target, {0, 1}, Polarity::Positive},
                                      {Element::Target, {1, 2}, Polarity::Negative}}));
}

TEST(Decode, RejectsInvalidSequences) {
  EXPECT_THROW(decode(tags({"O", "I-targ"}), kTarget), ValidationError);
  EXPECT_THROW(decode(tags({"I-targ"}), kTarget), ValidationError);
  EXPECT_THROW(decode(tags({"B-exp"}), kTarget), ValidationError);
  EXPECT_THROW(decode(tags({"B-targ-positive", "I-targ-negative"}), kPolarTargeted),
               ValidationError);
}

TEST(Repair, Examples) {
  EXPECT_EQ(to_strings(repair({"O", "I-targ"}, kTarget)), (std::vector<std::string>{"O", "B-targ"}));
  EXPECT_EQ(to_strings(repair({"B-targ", "I-targ", "O"}, kTarget)),
            (std::vector<std::string>{"B-targ", "I-targ", "O"}));
  EXPECT_EQ(to_strings(repair({"B-targ-positive", "I-targ-negative"}, kPolarTargeted)),
            (std::vector<std::string>{"B-targ-positive", "B-targ-negative"}));
  EXPECT_EQ(to_strings(repair({"I-targ", "I-targ"}, kTarget)),
            (std::vector<std::string>{"B-targ", "I-targ"}));
  EXPECT_THROW(repair({"B-exp"}, kTarget), ValidationError);
  EXPECT_THROW(repair({"B-targ-positive"}, kTarget), ValidationError);
}

TEST(Repair, ValidAndIdempotentOnRandomLabels) {
  Rng rng(17);
  for (int k = 0; k < 2000; ++k) {
    const TagScheme scheme = testing::random_scheme(rng);
    const TagSequence raw = testing::random_labels(rng, static_cast<int>(rng.below(12)), scheme);
    const TagSequence fixed = repair(raw);
    ASSERT_TRUE(is_valid_bio(fixed));
    ASSERT_EQ(repair(fixed), fixed);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      // Only the position of an invalid I may change.
      ASSERT_TRUE(raw[i].same_chunk(fixed[i]));
      if (raw[i] != fixed[i]) {
        ASSERT_EQ(raw[i].position, Position::I);
        ASSERT_EQ(fixed[i].position, Position::B);
      }
    }
    if (is_valid_bio(raw)) ASSERT_EQ(fixed, raw);
  }
}

TEST(EncodeDecode, RoundTripConflictFree) {
  Rng rng(31337);
  for (int k = 0; k < 1000; ++k) {
    const Sentence s = testing::random_sentence(rng, "r" + std::to_string(k));
    for (const TagScheme& scheme : testing::all_schemes()) {
      const TagSequence t = encode(s, scheme, OverlapPolicy::Strict);
      ASSERT_TRUE(is_valid_bio(t));
      ASSERT_EQ(decode(t, scheme), testing::expected_spans(s, scheme)) << scheme.name();
    }
  }
}

TEST(EncodeDecode, RoundTripWithOverlapsRecoversIncludedSpans) {
  Rng rng(4242);
  testing::SentenceShape shape;
  shape.disjoint_within_type = false;
  shape.disjoint_across_types = false;
  shape.max_opinions = 4;
  for (int k = 0; k < 1000; ++k) {
    const Sentence s = testing::random_sentence(rng, "o" + std::to_string(k), shape);
    for (const TagScheme& scheme : testing::all_schemes()) {
      const TagSequence t = encode(s, scheme);
      ASSERT_TRUE(is_valid_bio(t));
      ASSERT_EQ(decode(t, scheme), included_spans(s, scheme));
      ASSERT_EQ(encode(s, scheme), t);
    }
  }
}

}  // namespace
}  // namespace fgs
