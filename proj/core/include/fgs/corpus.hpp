#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fgs {

using Json = nlohmann::ordered_json;

// Half-open token interval [start, end).
struct Span {
  int start = 0;
  int end = 0;

  int size() const { return end - start; }
  bool contains(int token) const { return token >= start && token < end; }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }

  auto operator<=>(const Span&) const = default;
};

enum class Polarity { Positive, Negative, Neutral, Conflict };

std::string_view to_string(Polarity polarity);
std::optional<Polarity> polarity_from_string(std::string_view text);

struct Opinion {
  std::vector<Span> holder;
  std::vector<Span> target;
  std::vector<Span> expression;
  Polarity polarity = Polarity::Neutral;
  std::optional<std::string> intensity;
  // Fields not in the canonical schema, kept for round trips.
  Json extra = Json::object();

  bool operator==(const Opinion&) const = default;
};

struct Sentence {
  std::string sent_id;
  std::vector<std::string> tokens;
  std::vector<Opinion> opinions;
  Json extra = Json::object();

  int size() const { return static_cast<int>(tokens.size()); }

  bool operator==(const Sentence&) const = default;
};

enum class Split { Train, Dev, Test, Unsplit };

std::string_view to_string(Split split);
std::optional<Split> split_from_string(std::string_view text);

struct Corpus {
  std::string name;
  Split split = Split::Unsplit;
  std::vector<Sentence> sentences;
  Json extra = Json::object();

  bool operator==(const Corpus&) const = default;
};

// Space-joined tokens of a span list, in span order.
std::string surface_form(const Sentence& sentence,
                         const std::vector<Span>& spans);

// Total number of tokens covered by a span list.
int span_length(const std::vector<Span>& spans);

// Throws ValidationError naming the sent_id and field path of the first
// violated invariant.
void validate(const Sentence& sentence);
void validate(const Corpus& corpus);

// Parses the canonical JSON document and validates it.
Corpus parse_corpus(std::string_view json_document);
// Canonical serialization; unknown fields are written back after the known
// ones. Output ends with a newline.
std::string serialize_corpus(const Corpus& corpus);

Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Table-driven mapping from source-specific polarity labels onto Polarity.
// Canonical names always map to themselves.
class PolarityMap {
 public:
  PolarityMap() = default;
  explicit PolarityMap(std::map<std::string, Polarity> table)
      : table_(table.begin(), table.end()) {}

  // JSON object {"raw label": "positive" | "negative" | "neutral" | "conflict"}.
  static PolarityMap from_json(const Json& object);
  static PolarityMap load(const std::filesystem::path& path);

  void add(std::string raw, Polarity polarity);
  std::optional<Polarity> find(std::string_view raw) const;

 private:
  std::map<std::string, Polarity, std::less<>> table_;
};

// Throws ValidationError naming the label when it is not mapped.
Polarity normalize_polarity(std::string_view raw_label,
                            const PolarityMap& map = {});

struct CorpusSplits {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// Uniform shuffle by seed; dev and test each get floor(N / 10) sentences and
// train the rest. Sentences keep their original relative order inside each
// split. Requires an unsplit corpus with at least 10 sentences.
CorpusSplits split_corpus(const Corpus& corpus, std::uint64_t seed);

}  // namespace fgs
