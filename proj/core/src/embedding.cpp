#include "fgs/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "fgs/error.hpp"
#include "fgs/rng.hpp"

namespace fgs {

namespace {

static_assert(std::endian::native == std::endian::little,
              "embedding files are read and written on little-endian hosts");

constexpr char kMagic[4] = {'F', 'G', 'S', 'E'};

void put_u32(std::ostream& out, std::uint32_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

void put_floats(std::ostream& out, std::span<const float> values) {
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
}

class Reader {
 public:
  Reader(std::istream& in, const std::filesystem::path& path) : in_(in), path_(path) {}

  std::uint32_t u32(const char* what) {
    std::uint32_t value = 0;
    read(&value, sizeof value, what);
    return value;
  }

  void read(void* dst, std::size_t bytes, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (in_.gcount() != static_cast<std::streamsize>(bytes)) {
      throw ValidationError(path_.string() + ": truncated embedding file while reading " +
                            what);
    }
  }

 private:
  std::istream& in_;
  const std::filesystem::path& path_;
};

}  // namespace

HashedStaticProvider::HashedStaticProvider(HashedStaticOptions options)
    : options_(options) {
  if (options_.dimension == 0) throw ValidationError("embedding dimension must be positive");
  if (options_.window < 0) throw ValidationError("context window must be non-negative");
}

std::vector<double> HashedStaticProvider::base_vector(std::string_view token) const {
  std::vector<double> v(options_.dimension, 0.0);
  if (token == kSeparatorToken) return v;
  Rng rng(mix64(fnv1a64(token) ^ mix64(options_.seed)));
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

EmbeddingMatrix HashedStaticProvider::embed(std::span<const std::string> tokens,
                                            std::string_view) const {
  const std::size_t n = tokens.size();
  const std::size_t d = options_.dimension;
  std::vector<std::vector<double>> base;
  base.reserve(n);
  for (const std::string& t : tokens) base.push_back(base_vector(t));

  EmbeddingMatrix out{Matrix(n, d), std::vector<double>(d, 0.0)};
  const auto w = static_cast<std::size_t>(options_.window);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= w ? i - w : 0;
    const std::size_t hi = std::min(n - 1, i + w);
    auto row = out.token_vectors.row(i);
    for (std::size_t j = lo; j <= hi; ++j) axpy(1.0, base[j], row);
    const double count = static_cast<double>(hi - lo + 1);
    for (double& x : row) x /= count;
    axpy(1.0, row, out.sentence_vector);
  }
  if (n > 0) {
    for (double& x : out.sentence_vector) x /= static_cast<double>(n);
  }
  return out;
}

Json HashedStaticProvider::describe() const {
  return {{"kind", "hashed-static"},
          {"dimension", options_.dimension},
          {"seed", options_.seed},
          {"window", options_.window}};
}

void write_embedding_file(const std::filesystem::path& path, std::uint32_t dimension,
                          std::span<const EmbeddingRecord> records) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write embedding file " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    put_u32(out, kEmbeddingFileVersion);
    put_u32(out, dimension);
    put_u32(out, static_cast<std::uint32_t>(records.size()));
    for (const EmbeddingRecord& r : records) {
      if (r.sentence_vector.size() != dimension ||
          r.token_vectors.size() % dimension != 0) {
        throw ValidationError("embedding record \"" + r.key +
                              "\" does not match dimension " + std::to_string(dimension));
      }
      put_u32(out, static_cast<std::uint32_t>(r.key.size()));
      out.write(r.key.data(), static_cast<std::streamsize>(r.key.size()));
      put_u32(out, static_cast<std::uint32_t>(r.token_vectors.size() / dimension));
      put_floats(out, r.token_vectors);
      put_floats(out, r.sentence_vector);
    }
    if (!out) throw Error("failed writing embedding file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::shared_ptr<FileBackedProvider> FileBackedProvider::open(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file " + path.string());
  Reader reader(in, path);
  char magic[4];
  reader.read(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ValidationError(path.string() + ": not an embedding file (bad magic)");
  }
  const std::uint32_t version = reader.u32("version");
  if (version != kEmbeddingFileVersion) {
    throw ValidationError(path.string() + ": unsupported embedding file version " +
                          std::to_string(version));
  }
  std::shared_ptr<FileBackedProvider> provider(new FileBackedProvider());
  provider->path_ = path;
  provider->dimension_ = reader.u32("dimension");
  if (provider->dimension_ == 0) {
    throw ValidationError(path.string() + ": embedding dimension is zero");
  }
  const std::size_t d = provider->dimension_;
  const std::uint32_t count = reader.u32("record count");
  std::vector<float> buffer;
  for (std::uint32_t r = 0; r < count; ++r) {
    std::string key(reader.u32("key length"), '\0');
    reader.read(key.data(), key.size(), "key");
    const std::uint32_t n = reader.u32("token count");
    EmbeddingMatrix m{Matrix(n, d), std::vector<double>(d)};
    buffer.resize(static_cast<std::size_t>(n) * d);
    reader.read(buffer.data(), buffer.size() * sizeof(float), "token vectors");
    std::copy(buffer.begin(), buffer.end(), m.token_vectors.data().begin());
    buffer.resize(d);
    reader.read(buffer.data(), d * sizeof(float), "sentence vector");
    std::copy(buffer.begin(), buffer.end(), m.sentence_vector.begin());
    if (!provider->records_.emplace(key, std::move(m)).second) {
      throw ValidationError(path.string() + ": duplicate key \"" + key + "\"");
    }
  }
  return provider;
}

bool FileBackedProvider::contains(std::string_view key) const {
  return records_.find(key) != records_.end();
}

EmbeddingMatrix FileBackedProvider::embed(std::span<const std::string> tokens,
                                          std::string_view key) const {
  const auto it = records_.find(key);
  if (it == records_.end()) {
    throw ValidationError(path_.string() + ": no embeddings for sent_id \"" +
                          std::string(key) + "\"");
  }
  if (it->second.size() != tokens.size()) {
    throw ValidationError(path_.string() + ": record \"" + std::string(key) + "\" has " +
                          std::to_string(it->second.size()) + " token vectors but input has " +
                          std::to_string(tokens.size()) + " tokens");
  }
  return it->second;
}

Json FileBackedProvider::describe() const {
  return {{"kind", "file-backed"}, {"path", path_.string()}, {"dimension", dimension_}};
}

std::shared_ptr<const EmbeddingProvider> make_provider(const Json& description) {
  const std::string kind = description.value("kind", std::string("hashed-static"));
  if (kind == "hashed-static" || kind == "hashed") {
    HashedStaticOptions options;
    options.dimension = description.value("dimension", options.dimension);
    options.seed = description.value("seed", options.seed);
    options.window = description.value("window", options.window);
    return std::make_shared<HashedStaticProvider>(options);
  }
  if (kind == "file-backed" || kind == "file") {
    if (!description.contains("path")) {
      throw ValidationError("file-backed provider needs a \"path\"");
    }
    auto provider = FileBackedProvider::open(description["path"].get<std::string>());
    if (description.contains("dimension") &&
        description["dimension"].get<std::size_t>() != provider->dimension()) {
      throw ValidationError(
          "embedding dimension mismatch: expected d=" +
          std::to_string(description["dimension"].get<std::size_t>()) + ", file " +
          description["path"].get<std::string>() + " has d=" +
          std::to_string(provider->dimension()));
    }
    return provider;
  }
  throw ValidationError("unknown embedding provider kind \"" + kind + "\"");
}

}  // namespace fgs
