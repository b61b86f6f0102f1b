#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "fgs/corpus.hpp"
#include "fgs/error.hpp"
#include "generators.hpp"
#include "synthetic.hpp"
#include "test_paths.hpp"

namespace fgs {
namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::string twelve_token_doc(const std::string& opinion) {
  return R"({"name": "x", "split": "unsplit", "sentences": [{"sent_id": "s12",
    "tokens": ["a","b","c","d","e","f","g","h","i","j","k","l"],
    "opinions": [)" + opinion + "]}]}";
}

TEST(ParseCorpus, UmucFixture) {
  const Corpus c = load_corpus(testing::data_path("umuc.json"));
  ASSERT_EQ(c.sentences.size(), 1u);
  const Sentence& s = c.sentences[0];
  EXPECT_EQ(s.tokens.size(), 13u);
  ASSERT_EQ(s.opinions.size(), 2u);
  EXPECT_EQ(s.opinions[0].holder, (std::vector<Span>{{2, 4}}));
  EXPECT_EQ(s.opinions[0].target, (std::vector<Span>{{5, 6}}));
  EXPECT_EQ(s.opinions[0].expression, (std::vector<Span>{{6, 8}}));
  EXPECT_EQ(s.opinions[0].polarity, Polarity::Positive);
  EXPECT_TRUE(s.opinions[1].holder.empty());
  EXPECT_EQ(s.opinions[1].target, (std::vector<Span>{{11, 12}}));
  EXPECT_EQ(s.opinions[1].expression, (std::vector<Span>{{9, 11}}));
  EXPECT_EQ(s.opinions[1].polarity, Polarity::Negative);
  EXPECT_EQ(s, testing::umuc_sentence());
  EXPECT_EQ(surface_form(s, s.opinions[0].expression), "5 stars");
}

TEST(ParseCorpus, EmptyOpinionsAllowed) {
  const Corpus c = parse_corpus(
      R"({"name": "x", "split": "train", "sentences": [{"sent_id": "a", "tokens": ["hi"], "opinions": []}]})");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_TRUE(c.sentences[0].opinions.empty());
  EXPECT_EQ(c.split, Split::Train);
}

TEST(ParseCorpus, SpanOutOfRangeNamesSentenceAndPath) {
  const std::string msg = message_of([] {
    parse_corpus(twelve_token_doc(
        R"({"holder": [], "target": [[5, 99]], "expression": [], "polarity": "positive"})"));
  });
  EXPECT_NE(msg.find("span out of range"), std::string::npos) << msg;
  EXPECT_NE(msg.find("s12"), std::string::npos) << msg;
  EXPECT_NE(msg.find("target"), std::string::npos) << msg;
  EXPECT_THROW(parse_corpus(twelve_token_doc(
                   R"({"holder": [], "target": [[5, 99]], "expression": [], "polarity": "positive"})")),
               ValidationError);
}

TEST(ParseCorpus, RejectsEmptyAndReversedSpans) {
  EXPECT_THROW(parse_corpus(twelve_token_doc(
                   R"({"holder": [], "target": [[3, 3]], "expression": [], "polarity": "positive"})")),
               ValidationError);
  EXPECT_THROW(parse_corpus(twelve_token_doc(
                   R"({"holder": [], "target": [[4, 2]], "expression": [], "polarity": "positive"})")),
               ValidationError);
  EXPECT_THROW(parse_corpus(twelve_token_doc(
                   R"({"holder": [], "target": [[-1, 2]], "expression": [], "polarity": "positive"})")),
               ValidationError);
}

TEST(ParseCorpus, RejectsUnsortedOrOverlappingSpanLists) {
  EXPECT_THROW(parse_corpus(twelve_token_doc(
                   R"({"holder": [], "target": [[4, 6], [1, 2]], "expression": [], "polarity": "positive"})")),
               ValidationError);
  EXPECT_THROW(parse_corpus(twelve_token_doc(
                   R"({"holder": [], "target": [[1, 4], [3, 6]], "expression": [], "polarity": "positive"})")),
               ValidationError);
}

TEST(ParseCorpus, RejectsEmptyTarget) {
  const std::string msg = message_of([] {
    parse_corpus(twelve_token_doc(
        R"({"holder": [], "target": [], "expression": [], "polarity": "positive"})"));
  });
  EXPECT_NE(msg.find("target"), std::string::npos) << msg;
}

TEST(ParseCorpus, UnknownPolarityIsNamed) {
  const std::string msg = message_of([] {
    parse_corpus(twelve_token_doc(
        R"({"holder": [], "target": [[1, 2]], "expression": [], "polarity": "ecstatic"})"));
  });
  EXPECT_NE(msg.find("ecstatic"), std::string::npos) << msg;
  EXPECT_NE(msg.find("s12"), std::string::npos) << msg;
  EXPECT_NE(msg.find("polarity"), std::string::npos) << msg;
}

TEST(ParseCorpus, DuplicateSentIdIsNamed) {
  const std::string msg = message_of([] {
    parse_corpus(R"({"name": "x", "split": "unsplit", "sentences": [
      {"sent_id": "dup", "tokens": ["a"], "opinions": []},
      {"sent_id": "dup", "tokens": ["b"], "opinions": []}]})");
  });
  EXPECT_NE(msg.find("duplicate sent_id"), std::string::npos) << msg;
  EXPECT_NE(msg.find("dup"), std::string::npos) << msg;
  EXPECT_NE(msg.find("sentences[1]"), std::string::npos) << msg;
}

TEST(ParseCorpus, MalformedJson) {
  EXPECT_THROW(parse_corpus("{\"name\": "), ParseError);
  EXPECT_THROW(parse_corpus("[1, 2]"), ValidationError);
  EXPECT_THROW(parse_corpus(R"({"name": "x", "split": "sideways", "sentences": []})"),
               ValidationError);
  EXPECT_THROW(parse_corpus(R"({"name": "x", "split": "train", "sentences": [
      {"sent_id": "a", "tokens": [], "opinions": []}]})"),
               ValidationError);
  EXPECT_THROW(parse_corpus(R"({"name": "x", "split": "train", "sentences": [
      {"sent_id": "a", "opinions": []}]})"),
               ValidationError);
}

TEST(ParseCorpus, UnknownFieldsSurviveRoundTrip) {
  const std::string doc = R"({"name": "x", "split": "unsplit", "source": "mpqa-2.0",
    "sentences": [{"sent_id": "a", "tokens": ["a", "b"], "doc": "d7",
      "opinions": [{"holder": [], "target": [[0, 1]], "expression": [], "polarity": "neutral",
                    "intensity": "strong", "annotator": 3}]}]})";
  const Corpus c = parse_corpus(doc);
  EXPECT_EQ(c.extra.at("source"), "mpqa-2.0");
  EXPECT_EQ(c.sentences[0].extra.at("doc"), "d7");
  EXPECT_EQ(c.sentences[0].opinions[0].extra.at("annotator"), 3);
  EXPECT_EQ(c.sentences[0].opinions[0].intensity, "strong");
  const std::string once = serialize_corpus(c);
  EXPECT_EQ(parse_corpus(once), c);
  EXPECT_EQ(serialize_corpus(parse_corpus(once)), once);
  EXPECT_NE(once.find("\"annotator\""), std::string::npos);
}

TEST(ParseCorpus, SerializationEndsWithNewline) {
  const std::string text = serialize_corpus(testing::umuc_corpus());
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(text.back(), '\n');
}

TEST(ParseCorpus, RandomRoundTrips) {
  Rng rng(20240501);
  for (int k = 0; k < 1000; ++k) {
    testing::SentenceShape shape;
    shape.disjoint_across_types = rng.bernoulli(0.5);
    const Corpus c = testing::random_corpus(rng, 1 + static_cast<int>(rng.below(4)), shape);
    const Corpus back = parse_corpus(serialize_corpus(c));
    ASSERT_EQ(back, c) << serialize_corpus(c);
    ASSERT_EQ(parse_corpus(serialize_corpus(back)), c);
  }
}

TEST(ParseCorpus, FileRoundTrip) {
  const auto path = testing::scratch_dir("corpus") / "umuc.json";
  save_corpus(testing::umuc_corpus(), path);
  EXPECT_EQ(load_corpus(path), testing::umuc_corpus());
  EXPECT_THROW(load_corpus(path.parent_path() / "missing.json"), Error);
}

TEST(NormalizePolarity, Canonical) {
  EXPECT_EQ(normalize_polarity("positive"), Polarity::Positive);
  EXPECT_EQ(normalize_polarity("negative"), Polarity::Negative);
  EXPECT_EQ(normalize_polarity("neutral"), Polarity::Neutral);
  EXPECT_EQ(normalize_polarity("conflict"), Polarity::Conflict);
}

TEST(NormalizePolarity, TableDriven) {
  const PolarityMap map = PolarityMap::load(testing::data_path("polarity_map.json"));
  EXPECT_EQ(normalize_polarity("strongly-negative", map), Polarity::Negative);
  EXPECT_EQ(normalize_polarity("weakly-positive", map), Polarity::Positive);
  EXPECT_EQ(normalize_polarity("both", map), Polarity::Conflict);
  EXPECT_EQ(normalize_polarity("positive", map), Polarity::Positive);
}

TEST(NormalizePolarity, UnmappedLabelIsNamed) {
  const std::string msg = message_of([] { normalize_polarity("strongly-negative"); });
  EXPECT_NE(msg.find("strongly-negative"), std::string::npos) << msg;
  EXPECT_THROW(normalize_polarity("meh"), ValidationError);
  EXPECT_THROW(PolarityMap::from_json(Json{{"x", "ecstatic"}}), ValidationError);
}

Corpus numbered_corpus(int n) {
  Corpus c;
  c.name = "numbered";
  for (int i = 0; i < n; ++i) {
    Sentence s;
    s.sent_id = "n" + std::to_string(i);
    s.tokens = {"t" + std::to_string(i)};
    c.sentences.push_back(s);
  }
  return c;
}

std::vector<std::string> ids(const Corpus& c) {
  std::vector<std::string> out;
  for (const Sentence& s : c.sentences) out.push_back(s.sent_id);
  return out;
}

TEST(SplitCorpus, HundredSentences) {
  const CorpusSplits s = split_corpus(numbered_corpus(100), 7);
  EXPECT_EQ(s.train.sentences.size(), 80u);
  EXPECT_EQ(s.dev.sentences.size(), 10u);
  EXPECT_EQ(s.test.sentences.size(), 10u);
  EXPECT_EQ(s.train.split, Split::Train);
  EXPECT_EQ(s.dev.split, Split::Dev);
  EXPECT_EQ(s.test.split, Split::Test);
}

TEST(SplitCorpus, FloorArithmetic) {
  const CorpusSplits s = split_corpus(numbered_corpus(25), 7);
  EXPECT_EQ(s.train.sentences.size(), 21u);
  EXPECT_EQ(s.dev.sentences.size(), 2u);
  EXPECT_EQ(s.test.sentences.size(), 2u);
}

TEST(SplitCorpus, DeterministicPartition) {
  for (const int n : {10, 11, 37, 100, 503}) {
    const Corpus c = numbered_corpus(n);
    for (const std::uint64_t seed : {0u, 1u, 7u, 99u}) {
      const CorpusSplits a = split_corpus(c, seed);
      const CorpusSplits b = split_corpus(c, seed);
      EXPECT_EQ(ids(a.train), ids(b.train));
      EXPECT_EQ(ids(a.dev), ids(b.dev));
      EXPECT_EQ(ids(a.test), ids(b.test));
      std::set<std::string> all;
      for (const auto* part : {&a.train, &a.dev, &a.test}) {
        for (const auto& id : ids(*part)) EXPECT_TRUE(all.insert(id).second) << id;
      }
      EXPECT_EQ(all.size(), static_cast<std::size_t>(n));
      EXPECT_EQ(a.dev.sentences.size(), static_cast<std::size_t>(n / 10));
      EXPECT_EQ(a.test.sentences.size(), static_cast<std::size_t>(n / 10));
    }
  }
}

TEST(SplitCorpus, SeedChangesPartition) {
  const Corpus c = numbered_corpus(100);
  EXPECT_NE(ids(split_corpus(c, 1).dev), ids(split_corpus(c, 2).dev));
}

TEST(SplitCorpus, Preconditions) {
  EXPECT_THROW(split_corpus(numbered_corpus(9), 1), ValidationError);
  Corpus already = numbered_corpus(50);
  already.split = Split::Train;
  EXPECT_THROW(split_corpus(already, 1), ValidationError);
}

}  // namespace
}  // namespace fgs
