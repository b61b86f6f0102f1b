#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgs/corpus.hpp"
#include "fgs/matrix.hpp"

namespace fgs {

// Separator between the target segment and the sentence in classifier inputs.
inline constexpr std::string_view kSeparatorToken = "[SEP]";

struct EmbeddingMatrix {
  Matrix token_vectors;                // n x d
  std::vector<double> sentence_vector;  // d

  std::size_t size() const { return token_vectors.rows(); }
  std::size_t dimension() const { return sentence_vector.size(); }

  bool operator==(const EmbeddingMatrix&) const = default;
};

// Supplies per-token and sentence vectors for a token sequence. `key`
// identifies the sequence for providers that look vectors up (the sent_id
// for tagging inputs, classifier_key() for classifier inputs).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;
  virtual EmbeddingMatrix embed(std::span<const std::string> tokens,
                                std::string_view key) const = 0;
  // Enough to rebuild the provider with make_provider().
  virtual Json describe() const = 0;
};

struct HashedStaticOptions {
  std::size_t dimension = 64;
  std::uint64_t seed = 0;
  int window = 1;
};

// Each token string hashes (with the seed) to a fixed unit vector; a token's
// contextual vector is the mean of the base vectors in [i - w, i + w]
// clipped to the sentence, and the sentence vector is the mean of the
// contextual vectors. The separator token embeds to zero.
class HashedStaticProvider final : public EmbeddingProvider {
 public:
  explicit HashedStaticProvider(HashedStaticOptions options = {});

  std::size_t dimension() const override { return options_.dimension; }
  EmbeddingMatrix embed(std::span<const std::string> tokens,
                        std::string_view key) const override;
  Json describe() const override;

  std::vector<double> base_vector(std::string_view token) const;
  const HashedStaticOptions& options() const { return options_; }

 private:
  HashedStaticOptions options_;
};

// One sequence in an embedding file.
struct EmbeddingRecord {
  std::string key;
  std::vector<float> token_vectors;  // n x d, row-major
  std::vector<float> sentence_vector;
};

// Binary little-endian layout: "FGSE", u32 version (1), u32 d,
// u32 record count; per record u32 key length, key bytes, u32 n,
// n*d float32 token vectors, d float32 sentence vector.
inline constexpr std::uint32_t kEmbeddingFileVersion = 1;

void write_embedding_file(const std::filesystem::path& path, std::uint32_t dimension,
                          std::span<const EmbeddingRecord> records);

// Contextual vectors exported ahead of time, looked up by key. Values are
// returned exactly as stored.
class FileBackedProvider final : public EmbeddingProvider {
 public:
  static std::shared_ptr<FileBackedProvider> open(const std::filesystem::path& path);

  std::size_t dimension() const override { return dimension_; }
  EmbeddingMatrix embed(std::span<const std::string> tokens,
                        std::string_view key) const override;
  Json describe() const override;

  std::size_t record_count() const { return records_.size(); }
  bool contains(std::string_view key) const;

 private:
  FileBackedProvider() = default;

  std::filesystem::path path_;
  std::size_t dimension_ = 0;
  std::map<std::string, EmbeddingMatrix, std::less<>> records_;
};

// {"kind": "hashed-static", "dimension": d, "seed": s, "window": w} or
// {"kind": "file-backed", "path": "..."}.
std::shared_ptr<const EmbeddingProvider> make_provider(const Json& description);

}  // namespace fgs
