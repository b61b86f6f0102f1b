#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgs/augment.hpp"
#include "fgs/embedding.hpp"
#include "fgs/matrix.hpp"
#include "fgs/train_config.hpp"

namespace fgs {

// How one vector is produced from a target's token vectors.
enum class PoolingStrategy { CLS, First, Mean, Max, MaxMM };

std::string_view to_string(PoolingStrategy strategy);
std::optional<PoolingStrategy> pooling_from_string(std::string_view text);

inline constexpr std::array<PoolingStrategy, 5> kPoolingStrategies = {
    PoolingStrategy::CLS, PoolingStrategy::First, PoolingStrategy::Mean,
    PoolingStrategy::Max, PoolingStrategy::MaxMM};

// 3d for MaxMM, d otherwise.
std::size_t pooled_dimension(PoolingStrategy strategy, std::size_t dimension);

// CLS: the sentence vector. First: row of the first target token. Mean/Max:
// element-wise over all target tokens. MaxMM: [max ; min ; mean].
// Target spans are in the coordinates of `matrix`; they may be empty only for
// CLS.
std::vector<double> pool(const EmbeddingMatrix& matrix, const std::vector<Span>& target,
                         PoolingStrategy strategy);

// Two-segment classifier input: target tokens, "[SEP]", then the (possibly
// bracketed) sentence. `target` addresses the in-sentence occurrence.
struct ClassifierInput {
  std::string key;
  std::vector<std::string> tokens;  // after truncation
  std::vector<Span> target;         // in `tokens` coordinates
  // The untruncated sequence (what gets embedded) and, for every kept token,
  // its index there.
  std::vector<std::string> full_tokens;
  std::vector<std::size_t> rows;
};

// Embedding-file key for a classifier input: "<sent_id>@<s>:<e>[,<s>:<e>...]"
// with the target spans in original sentence coordinates.
std::string classifier_key(std::string_view sent_id, const std::vector<Span>& target);

// When the input exceeds max_sequence_length the sentence segment is cut to
// a window that keeps the whole target (head-first when it fits). Throws when
// the target cannot survive truncation.
ClassifierInput build_classifier_input(const Sentence& sentence, const std::vector<Span>& target,
                                       AugmentMode mode,
                                       const ExpressionSource& expressions = {},
                                       int max_sequence_length = 128);

inline constexpr std::size_t kClassCount = 3;

// Multinomial logistic regression over pooled vectors. Rows follow the
// class order positive, neutral, negative.
struct ClassifierModel {
  PoolingStrategy strategy = PoolingStrategy::CLS;
  AugmentMode mode = AugmentMode::Original;
  Matrix weights;             // 3 x d'
  std::vector<double> bias;   // 3
  int max_sequence_length = 128;

  static ClassifierModel zeros(PoolingStrategy strategy, std::size_t dimension,
                               AugmentMode mode = AugmentMode::Original);

  std::size_t input_dimension() const { return weights.cols(); }

  bool operator==(const ClassifierModel&) const = default;
};

struct ClassificationExample {
  Sentence sentence;
  std::vector<Span> target;
  Polarity gold = Polarity::Neutral;
  ExpressionSource expressions;
};

// One example per opinion whose polarity is not conflict.
std::vector<ClassificationExample> classification_examples(const Corpus& corpus);

int class_index(Polarity polarity);
Polarity class_polarity(int index);

// Numerically stable softmax of W x + b.
std::array<double, kClassCount> class_probabilities(const Matrix& weights,
                                                    std::span<const double> bias,
                                                    std::span<const double> features);

// Mean cross-entropy over the batch plus (weight_decay / 2) * ||W||^2 (bias
// not decayed), and its exact gradient.
struct LossGradient {
  double loss = 0.0;
  Matrix weights;
  std::vector<double> bias;
};

LossGradient loss_and_gradient(const Matrix& weights, std::span<const double> bias,
                               std::span<const std::vector<double>> features,
                               std::span<const int> classes, double weight_decay);

struct PolarityPrediction {
  Polarity label = Polarity::Positive;
  std::array<double, kClassCount> probabilities{};
};

// Argmax over the class scores; ties go to the earlier class
// (positive < neutral < negative).
PolarityPrediction predict_from_features(const ClassifierModel& model,
                                         std::span<const double> features);

PolarityPrediction predict_polarity(const ClassifierModel& model, const Sentence& sentence,
                                    const std::vector<Span>& target,
                                    const EmbeddingProvider& provider,
                                    const ExpressionSource& expressions = {});

// Pooled feature vector for one example under a strategy/mode.
std::vector<double> classifier_features(const ClassificationExample& example,
                                        PoolingStrategy strategy, AugmentMode mode,
                                        const EmbeddingProvider& provider,
                                        int max_sequence_length);

struct ClassifierTrainOptions {
  // Best-epoch selection by dev macro F1 when set.
  const std::vector<ClassificationExample>* dev = nullptr;
  std::vector<double>* dev_history = nullptr;
};

// Mini-batch SGD on the cross-entropy loss with linear warmup over the first
// config.warmup fraction of steps followed by linear decay, Bernoulli
// feature masking at rate config.dropout, and L2 weight decay. Deterministic
// per config.seed. Throws on an empty set, conflict labels, or fewer than two
// distinct classes.
ClassifierModel train_classifier(const std::vector<ClassificationExample>& examples,
                                 PoolingStrategy strategy, AugmentMode mode,
                                 const EmbeddingProvider& provider, const TrainConfig& config,
                                 const ClassifierTrainOptions& options = {});

}  // namespace fgs
