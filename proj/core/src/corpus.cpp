#include "fgs/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fgs/error.hpp"
#include "fgs/rng.hpp"

namespace fgs {

namespace {

constexpr std::string_view kOpinionFields[] = {"holder", "target", "expression",
                                               "polarity", "intensity"};
constexpr std::string_view kSentenceFields[] = {"sent_id", "tokens",
                                                "opinions"};
constexpr std::string_view kCorpusFields[] = {"name", "split", "sentences"};

template <std::size_t N>
bool is_known(std::string_view key, const std::string_view (&fields)[N]) {
  return std::find(std::begin(fields), std::end(fields), key) !=
         std::end(fields);
}

template <std::size_t N>
Json collect_extra(const Json& object, const std::string_view (&fields)[N]) {
  Json extra = Json::object();
  for (const auto& [key, value] : object.items()) {
    if (!is_known(key, fields)) extra[key] = value;
  }
  return extra;
}

std::string where(const std::string& sent_id, std::size_t index) {
  return "sentences[" + std::to_string(index) + "] (sent_id \"" + sent_id +
         "\")";
}

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw ValidationError(context + ": " + what);
}

const Json& require(const Json& object, std::string_view key,
                    const std::string& context) {
  const auto it = object.find(std::string(key));
  if (it == object.end()) fail(context, "missing field \"" + std::string(key) + "\"");
  return *it;
}

std::vector<Span> parse_spans(const Json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected a list of [start, end] pairs");
  std::vector<Span> spans;
  spans.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    const Json& pair = value[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      fail(path + "[" + std::to_string(i) + "]",
           "expected an integer pair [start, end]");
    }
    spans.push_back({pair[0].get<int>(), pair[1].get<int>()});
  }
  return spans;
}

Json spans_to_json(const std::vector<Span>& spans) {
  Json out = Json::array();
  for (const Span& s : spans) out.push_back(Json::array({s.start, s.end}));
  return out;
}

void check_spans(const std::vector<Span>& spans, int token_count,
                 const std::string& path) {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    const std::string item = path + "[" + std::to_string(i) + "]";
    if (s.start < 0 || s.start >= s.end || s.end > token_count) {
      fail(item, "span out of range [" + std::to_string(s.start) + "," +
                     std::to_string(s.end) + ") for " +
                     std::to_string(token_count) + " tokens");
    }
    if (i > 0 && spans[i - 1].end > s.start) {
      fail(item, "spans must be sorted and non-overlapping");
    }
  }
}

Opinion parse_opinion(const Json& value, const std::string& path,
                      const PolarityMap& polarity_map) {
  if (!value.is_object()) fail(path, "expected an object");
  Opinion opinion;
  opinion.holder = parse_spans(require(value, "holder", path), path + ".holder");
  opinion.target = parse_spans(require(value, "target", path), path + ".target");
  opinion.expression =
      parse_spans(require(value, "expression", path), path + ".expression");
  const Json& polarity = require(value, "polarity", path);
  if (!polarity.is_string()) fail(path + ".polarity", "expected a string");
  const auto mapped = polarity_map.find(polarity.get<std::string>());
  if (!mapped) {
    fail(path + ".polarity",
         "unknown polarity \"" + polarity.get<std::string>() + "\"");
  }
  opinion.polarity = *mapped;
  if (const auto it = value.find("intensity"); it != value.end()) {
    if (it->is_string()) {
      opinion.intensity = it->get<std::string>();
    } else if (!it->is_null()) {
      fail(path + ".intensity", "expected a string or null");
    }
  }
  opinion.extra = collect_extra(value, kOpinionFields);
  return opinion;
}

Json opinion_to_json(const Opinion& opinion) {
  Json out = Json::object();
  out["holder"] = spans_to_json(opinion.holder);
  out["target"] = spans_to_json(opinion.target);
  out["expression"] = spans_to_json(opinion.expression);
  out["polarity"] = std::string(to_string(opinion.polarity));
  out["intensity"] = opinion.intensity ? Json(*opinion.intensity) : Json();
  for (const auto& [key, value] : opinion.extra.items()) out[key] = value;
  return out;
}

Json sentence_to_json(const Sentence& sentence) {
  Json out = Json::object();
  out["sent_id"] = sentence.sent_id;
  out["tokens"] = sentence.tokens;
  Json opinions = Json::array();
  for (const Opinion& o : sentence.opinions) opinions.push_back(opinion_to_json(o));
  out["opinions"] = std::move(opinions);
  for (const auto& [key, value] : sentence.extra.items()) out[key] = value;
  return out;
}

}  // namespace

std::string_view to_string(Polarity polarity) {
  switch (polarity) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
    case Polarity::Conflict: return "conflict";
  }
  return "neutral";
}

std::optional<Polarity> polarity_from_string(std::string_view text) {
  if (text == "positive") return Polarity::Positive;
  if (text == "negative") return Polarity::Negative;
  if (text == "neutral") return Polarity::Neutral;
  if (text == "conflict") return Polarity::Conflict;
  return std::nullopt;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
    case Split::Unsplit: return "unsplit";
  }
  return "unsplit";
}

std::optional<Split> split_from_string(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "dev") return Split::Dev;
  if (text == "test") return Split::Test;
  if (text == "unsplit") return Split::Unsplit;
  return std::nullopt;
}

std::string surface_form(const Sentence& sentence,
                         const std::vector<Span>& spans) {
  std::string out;
  for (const Span& s : spans) {
    for (int i = s.start; i < s.end; ++i) {
      if (!out.empty()) out += ' ';
      out += sentence.tokens[i];
    }
  }
  return out;
}

int span_length(const std::vector<Span>& spans) {
  int total = 0;
  for (const Span& s : spans) total += s.size();
  return total;
}

void validate(const Sentence& sentence) {
  const std::string context = "sent_id \"" + sentence.sent_id + "\"";
  if (sentence.tokens.empty()) fail(context, "tokens must be non-empty");
  const int n = sentence.size();
  for (std::size_t i = 0; i < sentence.opinions.size(); ++i) {
    const Opinion& o = sentence.opinions[i];
    const std::string path = context + ": opinions[" + std::to_string(i) + "]";
    if (o.target.empty()) fail(path + ".target", "target must be non-empty");
    check_spans(o.holder, n, path + ".holder");
    check_spans(o.target, n, path + ".target");
    check_spans(o.expression, n, path + ".expression");
  }
}

void validate(const Corpus& corpus) {
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    const Sentence& s = corpus.sentences[i];
    if (!seen.insert(s.sent_id).second) {
      fail(where(s.sent_id, i), "duplicate sent_id");
    }
    try {
      validate(s);
    } catch (const ValidationError& e) {
      throw ValidationError("sentences[" + std::to_string(i) + "] " + e.what());
    }
  }
}

Corpus parse_corpus(std::string_view json_document) {
  Json root;
  try {
    root = Json::parse(json_document);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("corpus: expected a JSON object");

  const PolarityMap canonical;
  Corpus corpus;
  const Json& name = require(root, "name", "corpus");
  if (!name.is_string()) fail("corpus.name", "expected a string");
  corpus.name = name.get<std::string>();
  const Json& split = require(root, "split", "corpus");
  const auto parsed_split =
      split.is_string() ? split_from_string(split.get<std::string>())
                        : std::nullopt;
  if (!parsed_split) fail("corpus.split", "expected train|dev|test|unsplit");
  corpus.split = *parsed_split;

  const Json& sentences = require(root, "sentences", "corpus");
  if (!sentences.is_array()) fail("corpus.sentences", "expected a list");
  corpus.sentences.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const Json& value = sentences[i];
    const std::string index_path = "sentences[" + std::to_string(i) + "]";
    if (!value.is_object()) fail(index_path, "expected an object");
    Sentence sentence;
    const Json& sent_id = require(value, "sent_id", index_path);
    if (!sent_id.is_string()) fail(index_path + ".sent_id", "expected a string");
    sentence.sent_id = sent_id.get<std::string>();
    const std::string path = where(sentence.sent_id, i);
    const Json& tokens = require(value, "tokens", path);
    if (!tokens.is_array()) fail(path + ".tokens", "expected a list of strings");
    for (const Json& t : tokens) {
      if (!t.is_string()) fail(path + ".tokens", "expected a list of strings");
      sentence.tokens.push_back(t.get<std::string>());
    }
    const Json& opinions = require(value, "opinions", path);
    if (!opinions.is_array()) fail(path + ".opinions", "expected a list");
    for (std::size_t j = 0; j < opinions.size(); ++j) {
      sentence.opinions.push_back(parse_opinion(
          opinions[j], path + ".opinions[" + std::to_string(j) + "]", canonical));
    }
    sentence.extra = collect_extra(value, kSentenceFields);
    corpus.sentences.push_back(std::move(sentence));
  }
  corpus.extra = collect_extra(root, kCorpusFields);
  validate(corpus);
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  try {
    std::ostringstream out;
    out << "{\n  \"name\": " << Json(corpus.name).dump() << ",\n  \"split\": "
        << Json(std::string(to_string(corpus.split))).dump()
        << ",\n  \"sentences\": [";
    for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
      out << (i == 0 ? "\n    " : ",\n    ")
          << sentence_to_json(corpus.sentences[i]).dump();
    }
    out << (corpus.sentences.empty() ? "]" : "\n  ]");
    for (const auto& [key, value] : corpus.extra.items()) {
      out << ",\n  " << Json(key).dump() << ": " << value.dump();
    }
    out << "\n}\n";
    return out.str();
  } catch (const Json::type_error& e) {
    throw ValidationError(std::string("cannot serialize corpus: ") + e.what());
  }
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_corpus(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  const std::string text = serialize_corpus(corpus);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file " + path.string());
  out << text;
}

PolarityMap PolarityMap::from_json(const Json& object) {
  if (!object.is_object()) {
    throw ValidationError("polarity map: expected a JSON object");
  }
  PolarityMap map;
  for (const auto& [raw, value] : object.items()) {
    const auto polarity =
        value.is_string() ? polarity_from_string(value.get<std::string>())
                          : std::nullopt;
    if (!polarity) {
      throw ValidationError("polarity map: \"" + raw +
                            "\" must map to positive|negative|neutral|conflict");
    }
    map.add(raw, *polarity);
  }
  return map;
}

PolarityMap PolarityMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open polarity map " + path.string());
  try {
    return from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void PolarityMap::add(std::string raw, Polarity polarity) {
  table_[std::move(raw)] = polarity;
}

std::optional<Polarity> PolarityMap::find(std::string_view raw) const {
  if (const auto it = table_.find(raw); it != table_.end()) return it->second;
  return polarity_from_string(raw);
}

Polarity normalize_polarity(std::string_view raw_label, const PolarityMap& map) {
  if (const auto polarity = map.find(raw_label)) return *polarity;
  throw ValidationError("unmapped polarity label \"" + std::string(raw_label) +
                        "\"");
}

CorpusSplits split_corpus(const Corpus& corpus, std::uint64_t seed) {
  if (corpus.split != Split::Unsplit) {
    throw ValidationError("split_corpus: corpus \"" + corpus.name +
                          "\" is already split (" +
                          std::string(to_string(corpus.split)) + ")");
  }
  const std::size_t n = corpus.sentences.size();
  if (n < 10) {
    throw ValidationError("split_corpus: need at least 10 sentences, got " +
                          std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t held_out = n / 10;
  auto take = [&](std::size_t from, std::size_t to, Split split) {
    std::vector<std::size_t> picked(order.begin() + from, order.begin() + to);
    std::sort(picked.begin(), picked.end());
    Corpus part;
    part.name = corpus.name;
    part.split = split;
    part.extra = corpus.extra;
    part.sentences.reserve(picked.size());
    for (const std::size_t i : picked) part.sentences.push_back(corpus.sentences[i]);
    return part;
  };
  CorpusSplits splits;
  splits.dev = take(0, held_out, Split::Dev);
  splits.test = take(held_out, 2 * held_out, Split::Test);
  splits.train = take(2 * held_out, n, Split::Train);
  return splits;
}

}  // namespace fgs
