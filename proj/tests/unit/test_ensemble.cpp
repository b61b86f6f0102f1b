#include <gtest/gtest.h>

#include "fgs/ensemble.hpp"
#include "fgs/error.hpp"
#include "fgs/eval.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fgs {
namespace {

TagSequence parse_all(std::initializer_list<const char*> tags) {
  TagSequence out;
  for (const char* t : tags) out.push_back(Tag::parse(t));
  return out;
}

TEST(EnsembleUnion, Examples) {
  const std::vector<TagSequence> a = {parse_all({"O", "O"}), parse_all({"B-exp", "O"})};
  EXPECT_EQ(to_strings(ensemble_union(a)), (std::vector<std::string>{"B-exp", "O"}));

  const std::vector<TagSequence> none = {parse_all({"O", "O"}), parse_all({"O", "O"}),
                                         parse_all({"O", "O"})};
  EXPECT_EQ(to_strings(ensemble_union(none)), (std::vector<std::string>{"O", "O"}));

  const std::vector<TagSequence> joined = {parse_all({"O", "I-exp"}), parse_all({"B-exp", "O"})};
  EXPECT_EQ(to_strings(ensemble_union(joined)), (std::vector<std::string>{"B-exp", "I-exp"}));
}

TEST(EnsembleUnion, FirstNonOutsideMemberSetsPolarity) {
  const std::vector<TagSequence> members = {parse_all({"O", "B-exp-negative"}),
                                            parse_all({"B-exp-positive", "B-exp-positive"})};
  EXPECT_EQ(to_strings(ensemble_union(members)),
            (std::vector<std::string>{"B-exp-positive", "B-exp-negative"}));
}

TEST(EnsembleUnion, Errors) {
  const std::vector<TagSequence> ragged = {parse_all({"O"}), parse_all({"O", "O"})};
  EXPECT_THROW(ensemble_union(ragged), ValidationError);
  const std::vector<TagSequence> target = {parse_all({"B-targ"}), parse_all({"O"})};
  EXPECT_THROW(ensemble_union(target), ValidationError);
  EXPECT_TRUE(ensemble_union(std::vector<TagSequence>{}).empty());
}

TEST(RestrictTo, DropsOtherElements) {
  const TagSequence tags = parse_all({"B-holder", "B-targ", "I-targ", "B-exp"});
  EXPECT_EQ(to_strings(restrict_to(tags, Element::Target)),
            (std::vector<std::string>{"O", "B-targ", "I-targ", "O"}));
}

TEST(EnsembleUnion, RecallIsMonotoneAndMatchesSetUnion) {
  Rng rng(500);
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + static_cast<int>(rng.below(15));
    std::vector<TagSequence> members;
    std::vector<std::vector<std::string>> as_strings;
    for (int m = 0; m < 3; ++m) {
      members.push_back(testing::random_expression_tags(rng, n));
      as_strings.push_back(to_strings(members.back()));
    }
    const TagSequence merged = ensemble_union(members);
    ASSERT_EQ(to_strings(merged), testing::union_oracle(as_strings)) << "triple " << k;
    ASSERT_TRUE(is_valid_bio(merged));

    const TagSequence gold = testing::random_expression_tags(rng, n);
    const double union_recall = token_f1(gold, merged, Element::Expression).recall();
    for (const TagSequence& m : members) {
      ASSERT_GE(union_recall, token_f1(gold, m, Element::Expression).recall());
      for (int i = 0; i < n; ++i) {
        if (m[i].position != Position::O) ASSERT_NE(merged[i].position, Position::O);
      }
    }
  }
}

}  // namespace
}  // namespace fgs
