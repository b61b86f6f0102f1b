#include "fgs/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fgs/error.hpp"
#include "fgs/eval.hpp"

namespace fgs {

namespace {

static_assert(std::endian::native == std::endian::little);

constexpr char kMagic[4] = {'F', 'G', 'S', 'M'};
constexpr std::uint32_t kTaggerKind = 1;
constexpr std::uint32_t kClassifierKind = 2;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void i32(std::int32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void doubles(const std::vector<double>& v) {
    out_.write(reinterpret_cast<const char*>(v.data()),
               static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  void matrix(const Matrix& m) {
    u32(static_cast<std::uint32_t>(m.rows()));
    u32(static_cast<std::uint32_t>(m.cols()));
    doubles(m.data());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  void raw(void* dst, std::size_t bytes) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (in_.gcount() != static_cast<std::streamsize>(bytes)) {
      throw ValidationError(name_ + ": truncated model file");
    }
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    raw(&v, sizeof v);
    return v;
  }
  std::int32_t i32() {
    std::int32_t v = 0;
    raw(&v, sizeof v);
    return v;
  }
  std::string str() {
    std::string s(u32(), '\0');
    raw(s.data(), s.size());
    return s;
  }
  std::vector<double> doubles(std::size_t n) {
    std::vector<double> v(n);
    raw(v.data(), n * sizeof(double));
    return v;
  }
  Matrix matrix() {
    const std::uint32_t rows = u32();
    const std::uint32_t cols = u32();
    Matrix m(rows, cols);
    m.data() = doubles(static_cast<std::size_t>(rows) * cols);
    return m;
  }
  template <typename Enum>
  Enum enumeration(std::uint32_t count, const char* what) {
    const std::uint32_t v = u32();
    if (v >= count) throw ValidationError(name_ + ": invalid " + std::string(what));
    return static_cast<Enum>(v);
  }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
};

void write_atomically(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << bytes;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_sidecar(const std::filesystem::path& path, Json sidecar, const Json& metadata) {
  for (const auto& [key, value] : metadata.items()) sidecar[key] = value;
  write_atomically(sidecar_path(path), sidecar.dump(2) + "\n");
}

std::string header(std::uint32_t kind) {
  std::ostringstream out;
  out.write(kMagic, sizeof kMagic);
  Writer w(out);
  w.u32(kModelFileVersion);
  w.u32(kind);
  return out.str();
}

TaggerModel read_tagger(Reader& r) {
  TaggerModel m;
  m.scheme.strategy = r.enumeration<Strategy>(3, "strategy");
  m.scheme.mode = r.enumeration<TaskMode>(2, "task mode");
  m.mode = r.enumeration<AugmentMode>(4, "augment mode");
  m.max_sequence_length = r.i32();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) m.labels.push_back(Tag::parse(r.str()));
  if (m.labels != label_inventory(m.scheme)) {
    throw ValidationError(r.name() + ": label map does not match the " + m.scheme.name() +
                          " inventory");
  }
  m.emissions = r.matrix();
  m.transitions = r.matrix();
  if (m.emissions.rows() != count || m.transitions.rows() != count ||
      m.transitions.cols() != count) {
    throw ValidationError(r.name() + ": weight shapes do not match the label map");
  }
  m.mask = TransitionMask::bio(m.labels);
  return m;
}

ClassifierModel read_classifier(Reader& r) {
  ClassifierModel m;
  m.strategy = r.enumeration<PoolingStrategy>(5, "pooling strategy");
  m.mode = r.enumeration<AugmentMode>(4, "augment mode");
  m.max_sequence_length = r.i32();
  const std::uint32_t classes = r.u32();
  if (classes != kClassCount) throw ValidationError(r.name() + ": expected 3 classes");
  for (std::uint32_t c = 0; c < classes; ++c) {
    if (r.str() != to_string(kPolarityClasses[c])) {
      throw ValidationError(r.name() + ": unexpected class order");
    }
  }
  m.weights = r.matrix();
  m.bias = r.doubles(classes);
  if (m.weights.rows() != classes) {
    throw ValidationError(r.name() + ": weight rows do not match the classes");
  }
  return m;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& model_path) {
  return model_path.string() + ".json";
}

void save_model(const TaggerModel& model, const std::filesystem::path& path,
                const Json& metadata) {
  std::ostringstream out;
  out << header(kTaggerKind);
  Writer w(out);
  w.u32(static_cast<std::uint32_t>(model.scheme.strategy));
  w.u32(static_cast<std::uint32_t>(model.scheme.mode));
  w.u32(static_cast<std::uint32_t>(model.mode));
  w.i32(model.max_sequence_length);
  w.u32(static_cast<std::uint32_t>(model.labels.size()));
  for (const Tag& t : model.labels) w.str(t.str());
  w.matrix(model.emissions);
  w.matrix(model.transitions);
  write_atomically(path, out.str());

  Json sidecar = {{"format_version", kModelFileVersion},
                  {"kind", "tagger"},
                  {"scheme", {{"strategy", to_string(model.scheme.strategy)},
                              {"mode", to_string(model.scheme.mode)}}},
                  {"augment_mode", to_string(model.mode)},
                  {"dimension", model.dimension()},
                  {"labels", to_strings(model.labels)}};
  write_sidecar(path, std::move(sidecar), metadata);
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path,
                const Json& metadata) {
  std::ostringstream out;
  out << header(kClassifierKind);
  Writer w(out);
  w.u32(static_cast<std::uint32_t>(model.strategy));
  w.u32(static_cast<std::uint32_t>(model.mode));
  w.i32(model.max_sequence_length);
  w.u32(static_cast<std::uint32_t>(kClassCount));
  for (const Polarity p : kPolarityClasses) w.str(std::string(to_string(p)));
  w.matrix(model.weights);
  w.doubles(model.bias);
  write_atomically(path, out.str());

  const std::size_t d = model.strategy == PoolingStrategy::MaxMM
                            ? model.input_dimension() / 3
                            : model.input_dimension();
  Json sidecar = {{"format_version", kModelFileVersion},
                  {"kind", "classifier"},
                  {"strategy", to_string(model.strategy)},
                  {"augment_mode", to_string(model.mode)},
                  {"dimension", d},
                  {"classes", {"positive", "neutral", "negative"}}};
  write_sidecar(path, std::move(sidecar), metadata);
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  Reader r(in, path.string());
  char magic[4];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ValidationError(path.string() + ": not a model file (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kModelFileVersion) {
    throw ValidationError(path.string() + ": unsupported model version " +
                          std::to_string(version));
  }
  switch (r.u32()) {
    case kTaggerKind: return read_tagger(r);
    case kClassifierKind: return read_classifier(r);
    default: throw ValidationError(path.string() + ": unknown model kind");
  }
}

TaggerModel load_tagger(const std::filesystem::path& path) {
  AnyModel m = load_model(path);
  if (auto* t = std::get_if<TaggerModel>(&m)) return std::move(*t);
  throw ValidationError(path.string() + ": expected a tagger model, found a classifier");
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  AnyModel m = load_model(path);
  if (auto* c = std::get_if<ClassifierModel>(&m)) return std::move(*c);
  throw ValidationError(path.string() + ": expected a classifier model, found a tagger");
}

Json load_sidecar(const std::filesystem::path& model_path) {
  std::ifstream in(sidecar_path(model_path));
  if (!in) return Json::object();
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(sidecar_path(model_path).string() + ": " + e.what());
  }
}

}  // namespace fgs
