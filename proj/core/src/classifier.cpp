#include "fgs/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "fgs/error.hpp"
#include "fgs/eval.hpp"
#include "fgs/rng.hpp"

namespace fgs {

namespace {

std::vector<int> target_rows(const std::vector<Span>& target) {
  std::vector<int> rows;
  for (const Span& s : target) {
    for (int i = s.start; i < s.end; ++i) rows.push_back(i);
  }
  return rows;
}

EmbeddingMatrix select_rows(const EmbeddingMatrix& full, const std::vector<std::size_t>& rows) {
  if (rows.size() == full.size()) return full;
  EmbeddingMatrix out{Matrix(rows.size(), full.dimension()), full.sentence_vector};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = full.token_vectors.row(rows[i]);
    std::copy(src.begin(), src.end(), out.token_vectors.row(i).begin());
  }
  return out;
}

// Linear warmup to the base rate, then linear decay towards zero.
double step_rate(double base, std::size_t step, std::size_t total, double warmup) {
  const auto warm = static_cast<std::size_t>(std::floor(warmup * static_cast<double>(total)));
  if (step < warm) return base * static_cast<double>(step + 1) / static_cast<double>(warm);
  const std::size_t remaining = total - warm;
  return base * static_cast<double>(total - step) / static_cast<double>(remaining);
}

double dev_macro_f1(const ClassifierModel& model,
                    const std::vector<std::vector<double>>& features,
                    const std::vector<Polarity>& gold) {
  std::vector<Polarity> pred;
  pred.reserve(features.size());
  for (const auto& x : features) pred.push_back(predict_from_features(model, x).label);
  return macro_f1(gold, pred).macro_f1;
}

}  // namespace

std::string_view to_string(PoolingStrategy strategy) {
  switch (strategy) {
    case PoolingStrategy::CLS: return "CLS";
    case PoolingStrategy::First: return "First";
    case PoolingStrategy::Mean: return "Mean";
    case PoolingStrategy::Max: return "Max";
    case PoolingStrategy::MaxMM: return "MaxMM";
  }
  return "CLS";
}

std::optional<PoolingStrategy> pooling_from_string(std::string_view text) {
  for (const PoolingStrategy s : kPoolingStrategies) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::size_t pooled_dimension(PoolingStrategy strategy, std::size_t dimension) {
  return strategy == PoolingStrategy::MaxMM ? 3 * dimension : dimension;
}

std::vector<double> pool(const EmbeddingMatrix& matrix, const std::vector<Span>& target,
                         PoolingStrategy strategy) {
  if (strategy == PoolingStrategy::CLS) return matrix.sentence_vector;
  const std::vector<int> rows = target_rows(target);
  if (rows.empty()) {
    throw ValidationError("pool: empty target for " + std::string(to_string(strategy)) +
                          " pooling");
  }
  for (const int r : rows) {
    if (r < 0 || static_cast<std::size_t>(r) >= matrix.size()) {
      throw ValidationError("pool: target token " + std::to_string(r) +
                            " outside the embedded sequence");
    }
  }
  const std::size_t d = matrix.dimension();
  if (strategy == PoolingStrategy::First) {
    const auto row = matrix.token_vectors.row(rows.front());
    return {row.begin(), row.end()};
  }
  std::vector<double> maxes(d, -std::numeric_limits<double>::infinity());
  std::vector<double> mins(d, std::numeric_limits<double>::infinity());
  std::vector<double> means(d, 0.0);
  for (const int r : rows) {
    const auto row = matrix.token_vectors.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      maxes[j] = std::max(maxes[j], row[j]);
      mins[j] = std::min(mins[j], row[j]);
      means[j] += row[j];
    }
  }
  for (double& m : means) m /= static_cast<double>(rows.size());
  switch (strategy) {
    case PoolingStrategy::Mean: return means;
    case PoolingStrategy::Max: return maxes;
    default: break;
  }
  std::vector<double> out;
  out.reserve(3 * d);
  out.insert(out.end(), maxes.begin(), maxes.end());
  out.insert(out.end(), mins.begin(), mins.end());
  out.insert(out.end(), means.begin(), means.end());
  return out;
}

std::string classifier_key(std::string_view sent_id, const std::vector<Span>& target) {
  std::string key(sent_id);
  key += '@';
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (i > 0) key += ',';
    key += std::to_string(target[i].start) + ":" + std::to_string(target[i].end);
  }
  return key;
}

ClassifierInput build_classifier_input(const Sentence& sentence, const std::vector<Span>& target,
                                       AugmentMode mode, const ExpressionSource& expressions,
                                       int max_sequence_length) {
  if (target.empty()) throw ValidationError("classifier input: empty target");
  for (const Span& s : target) {
    if (s.start < 0 || s.start >= s.end || s.end > sentence.size()) {
      throw ValidationError("sent_id \"" + sentence.sent_id +
                            "\": classifier target span out of range");
    }
  }
  const AugmentedSentence augmented = insert_tags(sentence, mode, expressions);

  ClassifierInput input;
  input.key = classifier_key(sentence.sent_id, target);
  for (const Span& s : target) {
    for (int i = s.start; i < s.end; ++i) input.full_tokens.push_back(sentence.tokens[i]);
  }
  input.full_tokens.emplace_back(kSeparatorToken);
  const std::size_t prefix = input.full_tokens.size();
  input.full_tokens.insert(input.full_tokens.end(), augmented.tokens.begin(),
                           augmented.tokens.end());
  std::vector<Span> in_sentence = augmented.map_spans(target);

  const auto limit = static_cast<std::size_t>(max_sequence_length);
  std::size_t window_start = 0;
  std::size_t window_size = augmented.tokens.size();
  if (input.full_tokens.size() > limit) {
    const auto first = static_cast<std::size_t>(in_sentence.front().start);
    const auto last = static_cast<std::size_t>(in_sentence.back().end);
    if (prefix >= limit || last - first > limit - prefix) {
      throw ValidationError("sent_id \"" + sentence.sent_id +
                            "\": target does not survive truncation to " +
                            std::to_string(limit) + " tokens");
    }
    window_size = limit - prefix;
    window_start = last <= window_size ? 0 : last - window_size;
  }

  input.tokens.assign(input.full_tokens.begin(),
                      input.full_tokens.begin() + static_cast<std::ptrdiff_t>(prefix));
  for (std::size_t i = 0; i < prefix; ++i) input.rows.push_back(i);
  for (std::size_t i = window_start; i < window_start + window_size; ++i) {
    input.tokens.push_back(augmented.tokens[i]);
    input.rows.push_back(prefix + i);
  }
  const int shift = static_cast<int>(prefix) - static_cast<int>(window_start);
  for (Span& s : in_sentence) {
    s.start += shift;
    s.end += shift;
  }
  input.target = std::move(in_sentence);
  return input;
}

ClassifierModel ClassifierModel::zeros(PoolingStrategy strategy, std::size_t dimension,
                                       AugmentMode mode) {
  ClassifierModel m;
  m.strategy = strategy;
  m.mode = mode;
  m.weights = Matrix(kClassCount, pooled_dimension(strategy, dimension));
  m.bias.assign(kClassCount, 0.0);
  return m;
}

std::vector<ClassificationExample> classification_examples(const Corpus& corpus) {
  std::vector<ClassificationExample> examples;
  for (const Sentence& s : corpus.sentences) {
    for (const Opinion& o : s.opinions) {
      if (o.polarity == Polarity::Conflict) continue;
      examples.push_back({s, o.target, o.polarity, std::nullopt});
    }
  }
  return examples;
}

int class_index(Polarity polarity) {
  switch (polarity) {
    case Polarity::Positive: return 0;
    case Polarity::Neutral: return 1;
    case Polarity::Negative: return 2;
    case Polarity::Conflict: break;
  }
  throw ValidationError("conflict is not a classifier class");
}

Polarity class_polarity(int index) { return kPolarityClasses.at(static_cast<std::size_t>(index)); }

std::array<double, kClassCount> class_probabilities(const Matrix& weights,
                                                    std::span<const double> bias,
                                                    std::span<const double> features) {
  std::array<double, kClassCount> scores{};
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    scores[c] = dot(weights.row(c), features) + bias[c];
    top = std::max(top, scores[c]);
  }
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : scores) s /= total;
  return scores;
}

LossGradient loss_and_gradient(const Matrix& weights, std::span<const double> bias,
                               std::span<const std::vector<double>> features,
                               std::span<const int> classes, double weight_decay) {
  if (features.size() != classes.size() || features.empty()) {
    throw ValidationError("loss_and_gradient: need equally many features and classes");
  }
  LossGradient out{0.0, Matrix(weights.rows(), weights.cols()),
                   std::vector<double>(bias.size(), 0.0)};
  const double scale = 1.0 / static_cast<double>(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto probs = class_probabilities(weights, bias, features[i]);
    out.loss -= scale * std::log(probs[classes[i]]);
    for (std::size_t c = 0; c < kClassCount; ++c) {
      const double residual = probs[c] - (static_cast<int>(c) == classes[i] ? 1.0 : 0.0);
      axpy(scale * residual, features[i], out.weights.row(c));
      out.bias[c] += scale * residual;
    }
  }
  for (std::size_t j = 0; j < weights.data().size(); ++j) {
    const double w = weights.data()[j];
    out.loss += 0.5 * weight_decay * w * w;
    out.weights.data()[j] += weight_decay * w;
  }
  return out;
}

PolarityPrediction predict_from_features(const ClassifierModel& model,
                                         std::span<const double> features) {
  if (features.size() != model.input_dimension()) {
    throw ValidationError("classifier expects " + std::to_string(model.input_dimension()) +
                          " features, got " + std::to_string(features.size()));
  }
  PolarityPrediction out;
  out.probabilities = class_probabilities(model.weights, model.bias, features);
  std::size_t best = 0;
  double best_score = dot(model.weights.row(0), features) + model.bias[0];
  for (std::size_t c = 1; c < kClassCount; ++c) {
    const double s = dot(model.weights.row(c), features) + model.bias[c];
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  out.label = class_polarity(static_cast<int>(best));
  return out;
}

std::vector<double> classifier_features(const ClassificationExample& example,
                                        PoolingStrategy strategy, AugmentMode mode,
                                        const EmbeddingProvider& provider,
                                        int max_sequence_length) {
  const ClassifierInput input = build_classifier_input(
      example.sentence, example.target, mode, example.expressions, max_sequence_length);
  const EmbeddingMatrix full = provider.embed(input.full_tokens, input.key);
  return pool(select_rows(full, input.rows), input.target, strategy);
}

PolarityPrediction predict_polarity(const ClassifierModel& model, const Sentence& sentence,
                                    const std::vector<Span>& target,
                                    const EmbeddingProvider& provider,
                                    const ExpressionSource& expressions) {
  const ClassificationExample example{sentence, target, Polarity::Neutral, expressions};
  return predict_from_features(
      model, classifier_features(example, model.strategy, model.mode, provider,
                                 model.max_sequence_length));
}

ClassifierModel train_classifier(const std::vector<ClassificationExample>& examples,
                                 PoolingStrategy strategy, AugmentMode mode,
                                 const EmbeddingProvider& provider, const TrainConfig& config,
                                 const ClassifierTrainOptions& options) {
  config.validate();
  if (examples.empty()) throw ValidationError("train_classifier: no training examples");
  std::vector<std::vector<double>> features;
  std::vector<int> classes;
  features.reserve(examples.size());
  std::set<int> present;
  for (const ClassificationExample& e : examples) {
    classes.push_back(class_index(e.gold));
    present.insert(classes.back());
    features.push_back(
        classifier_features(e, strategy, mode, provider, config.max_sequence_length));
  }
  if (present.size() < 2) {
    throw ValidationError("train_classifier: degenerate class distribution (" +
                          std::to_string(present.size()) + " class present)");
  }

  std::vector<std::vector<double>> dev_features;
  std::vector<Polarity> dev_gold;
  if (options.dev) {
    for (const ClassificationExample& e : *options.dev) {
      dev_features.push_back(
          classifier_features(e, strategy, mode, provider, config.max_sequence_length));
      dev_gold.push_back(e.gold);
    }
  }

  ClassifierModel model = ClassifierModel::zeros(strategy, provider.dimension(), mode);
  model.max_sequence_length = config.max_sequence_length;
  ClassifierModel best = model;
  double best_dev = -1.0;

  const auto batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t batches_per_epoch = (features.size() + batch - 1) / batch;
  const std::size_t total_steps = batches_per_epoch * static_cast<std::size_t>(config.epochs);
  const double keep = 1.0 - config.dropout;

  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);
  std::size_t step = 0;
  std::vector<std::vector<double>> batch_features;
  std::vector<int> batch_classes;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t begin = 0; begin < order.size(); begin += batch, ++step) {
      const std::size_t end = std::min(order.size(), begin + batch);
      batch_features.clear();
      batch_classes.clear();
      for (std::size_t k = begin; k < end; ++k) {
        std::vector<double> x = features[order[k]];
        if (config.dropout > 0.0) {
          for (double& v : x) v = rng.bernoulli(keep) ? v / keep : 0.0;
        }
        batch_features.push_back(std::move(x));
        batch_classes.push_back(classes[order[k]]);
      }
      const LossGradient g = loss_and_gradient(model.weights, model.bias, batch_features,
                                               batch_classes, config.weight_decay);
      const double rate = step_rate(config.learning_rate, step, total_steps, config.warmup);
      axpy(-rate, g.weights.data(), model.weights.data());
      axpy(-rate, g.bias, model.bias);
    }
    if (options.dev) {
      const double f1 = dev_macro_f1(model, dev_features, dev_gold);
      if (options.dev_history) options.dev_history->push_back(f1);
      if (f1 > best_dev) {
        best_dev = f1;
        best = model;
      }
    }
  }
  return options.dev ? best : model;
}

}  // namespace fgs
