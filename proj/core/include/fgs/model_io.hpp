#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>

#include "fgs/classifier.hpp"
#include "fgs/corpus.hpp"
#include "fgs/tagger.hpp"

namespace fgs {

// Binary little-endian model file: "FGSM", u32 version (1), u32 kind
// (1 tagger, 2 classifier), then the kind-specific payload. Matrices are
// stored as u32 rows, u32 cols, float64 data (so weights round-trip exactly).
inline constexpr std::uint32_t kModelFileVersion = 1;

using AnyModel = std::variant<TaggerModel, ClassifierModel>;

// Writes `path` atomically plus a JSON sidecar at `path` + ".json" that
// records the model's scheme/strategy, mode and dimension merged with
// `metadata` (provider description, config, seed, ...).
void save_model(const TaggerModel& model, const std::filesystem::path& path,
                const Json& metadata = Json::object());
void save_model(const ClassifierModel& model, const std::filesystem::path& path,
                const Json& metadata = Json::object());

AnyModel load_model(const std::filesystem::path& path);
TaggerModel load_tagger(const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& model_path);
// Empty object when the sidecar is missing.
Json load_sidecar(const std::filesystem::path& model_path);

}  // namespace fgs
