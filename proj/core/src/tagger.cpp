#include "fgs/tagger.hpp"

#include <algorithm>
#include <numeric>

#include "fgs/error.hpp"
#include "fgs/eval.hpp"
#include "fgs/rng.hpp"

namespace fgs {

namespace {

// Perceptron weights with lazily averaged accumulators: after c updates
// the averaged weight is w - u / c.
struct AveragedWeights {
  Matrix emissions;
  Matrix transitions;
  Matrix emission_sums;
  Matrix transition_sums;
  double clock = 1.0;

  AveragedWeights(std::size_t labels, std::size_t dimension)
      : emissions(labels, dimension),
        transitions(labels, labels),
        emission_sums(labels, dimension),
        transition_sums(labels, labels) {}

  void update_emission(int label, std::span<const double> x, double sign) {
    axpy(sign, x, emissions.row(label));
    axpy(sign * clock, x, emission_sums.row(label));
  }

  void update_transition(int prev, int cur, double sign) {
    transitions(prev, cur) += sign;
    transition_sums(prev, cur) += sign * clock;
  }

  void averaged_into(TaggerModel& model) const {
    for (std::size_t i = 0; i < emissions.data().size(); ++i) {
      model.emissions.data()[i] = emissions.data()[i] - emission_sums.data()[i] / clock;
    }
    for (std::size_t i = 0; i < transitions.data().size(); ++i) {
      model.transitions.data()[i] =
          transitions.data()[i] - transition_sums.data()[i] / clock;
    }
  }
};

struct Prepared {
  TaggerInstance instance;
  EmbeddingMatrix features;  // truncated to the maximum sequence length
};

EmbeddingMatrix truncate_rows(EmbeddingMatrix m, std::size_t max_rows) {
  if (m.size() <= max_rows) return m;
  Matrix rows(max_rows, m.dimension());
  std::copy_n(m.token_vectors.data().begin(), max_rows * m.dimension(),
              rows.data().begin());
  m.token_vectors = std::move(rows);
  return m;
}

TagSequence to_original(const TagSequence& augmented_tags,
                        const AugmentedSentence& augmented, std::size_t original_size) {
  TagSequence tags(original_size);
  for (std::size_t k = 0; k < original_size; ++k) {
    tags[k] = augmented_tags[augmented.span_map[k]];
  }
  return repair(tags);
}

Matrix score_rows(const Matrix& emissions, const EmbeddingMatrix& embedded, std::size_t n) {
  const std::size_t labels = emissions.rows();
  Matrix scores(n, labels);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = embedded.token_vectors.row(i);
    for (std::size_t y = 0; y < labels; ++y) scores(i, y) = dot(emissions.row(y), x);
  }
  return scores;
}

}  // namespace

TaggerModel TaggerModel::zeros(const TagScheme& scheme, std::size_t dimension,
                               AugmentMode mode) {
  TaggerModel m;
  m.scheme = scheme;
  m.mode = mode;
  m.labels = label_inventory(scheme);
  m.emissions = Matrix(m.labels.size(), dimension);
  m.transitions = Matrix(m.labels.size(), m.labels.size());
  m.mask = TransitionMask::bio(m.labels);
  return m;
}

int TaggerModel::label_index(const Tag& tag) const {
  const auto it = std::find(labels.begin(), labels.end(), tag);
  if (it == labels.end()) {
    throw ValidationError("tag \"" + tag.str() + "\" is not in the " + scheme.name() +
                          " inventory");
  }
  return static_cast<int>(it - labels.begin());
}

TaggerInstance make_tagger_instance(const Sentence& sentence, const TagScheme& scheme,
                                    AugmentMode mode, const ExpressionSource& expressions) {
  const AugmentedSentence augmented = insert_tags(sentence, mode, expressions);
  Sentence remapped;
  remapped.sent_id = sentence.sent_id;
  remapped.tokens = augmented.tokens;
  for (const Opinion& o : sentence.opinions) {
    Opinion m = o;
    m.holder = augmented.map_spans(o.holder);
    m.target = augmented.map_spans(o.target);
    m.expression = augmented.map_spans(o.expression);
    remapped.opinions.push_back(std::move(m));
  }
  const TagSequence gold = encode(remapped, scheme);
  const std::vector<Tag> labels = label_inventory(scheme);

  TaggerInstance instance;
  instance.key = sentence.sent_id;
  instance.tokens = augmented.tokens;
  instance.labels.reserve(gold.size());
  for (const Tag& t : gold) {
    instance.labels.push_back(
        static_cast<int>(std::find(labels.begin(), labels.end(), t) - labels.begin()));
  }
  instance.original_index = strip_tags(augmented).original_index;
  return instance;
}

Matrix emission_scores(const TaggerModel& model, const EmbeddingMatrix& embedded) {
  if (embedded.dimension() != model.dimension()) {
    throw ValidationError("embedding dimension mismatch: model expects d=" +
                          std::to_string(model.dimension()) + ", provider gives d=" +
                          std::to_string(embedded.dimension()));
  }
  const std::size_t n =
      std::min(embedded.size(), static_cast<std::size_t>(model.max_sequence_length));
  return score_rows(model.emissions, embedded, n);
}

TagSequence predict_sequence(const TaggerModel& model, std::span<const std::string> tokens,
                             std::string_view key, const EmbeddingProvider& provider) {
  TagSequence tags(tokens.size());
  if (tokens.empty()) return tags;
  const Matrix scores = emission_scores(model, provider.embed(tokens, key));
  const ViterbiResult best = viterbi(scores, model.transitions, model.mask);
  for (std::size_t i = 0; i < best.path.size(); ++i) tags[i] = model.labels[best.path[i]];
  return tags;
}

TagSequence predict_tags(const TaggerModel& model, const Sentence& sentence,
                         const EmbeddingProvider& provider,
                         const ExpressionSource& expressions) {
  const AugmentedSentence augmented = insert_tags(sentence, model.mode, expressions);
  const TagSequence tags =
      predict_sequence(model, augmented.tokens, sentence.sent_id, provider);
  return to_original(tags, augmented, sentence.tokens.size());
}

TaggerModel train_tagger(const Corpus& corpus, const TagScheme& scheme, AugmentMode mode,
                         const EmbeddingProvider& provider, const TrainConfig& config,
                         const TaggerTrainOptions& options) {
  config.validate();
  if (corpus.sentences.empty()) throw ValidationError("train_tagger: empty training corpus");
  const std::size_t d = provider.dimension();
  const auto max_len = static_cast<std::size_t>(config.max_sequence_length);

  std::vector<Prepared> data;
  data.reserve(corpus.sentences.size());
  for (const Sentence& s : corpus.sentences) {
    Prepared p;
    p.instance = make_tagger_instance(s, scheme, mode);
    EmbeddingMatrix embedded = provider.embed(p.instance.tokens, p.instance.key);
    if (embedded.dimension() != d) {
      throw ValidationError("provider returned d=" + std::to_string(embedded.dimension()) +
                            " for \"" + s.sent_id + "\", expected d=" + std::to_string(d));
    }
    p.features = truncate_rows(std::move(embedded), max_len);
    p.instance.labels.resize(p.features.size());
    data.push_back(std::move(p));
  }

  TaggerModel model = TaggerModel::zeros(scheme, d, mode);
  model.max_sequence_length = config.max_sequence_length;
  AveragedWeights weights(model.labels.size(), d);

  std::vector<TagSequence> dev_gold;
  if (options.dev) {
    for (const Sentence& s : options.dev->sentences) dev_gold.push_back(encode(s, scheme));
  }
  double best_dev = -1.0;
  TaggerModel best = model;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      const Prepared& p = data[idx];
      if (p.features.size() == 0) continue;
      const Matrix scores = score_rows(weights.emissions, p.features, p.features.size());
      const std::vector<int> pred = viterbi(scores, weights.transitions, model.mask).path;
      const std::vector<int>& gold = p.instance.labels;
      if (pred != gold) {
        for (std::size_t i = 0; i < gold.size(); ++i) {
          if (pred[i] != gold[i]) {
            const auto x = p.features.token_vectors.row(i);
            weights.update_emission(gold[i], x, +1.0);
            weights.update_emission(pred[i], x, -1.0);
          }
          if (i > 0 && (pred[i - 1] != gold[i - 1] || pred[i] != gold[i])) {
            weights.update_transition(gold[i - 1], gold[i], +1.0);
            weights.update_transition(pred[i - 1], pred[i], -1.0);
          }
        }
      }
      weights.clock += 1.0;
    }

    weights.averaged_into(model);
    if (options.dev) {
      std::vector<TagSequence> predicted;
      predicted.reserve(options.dev->sentences.size());
      for (const Sentence& s : options.dev->sentences) {
        ExpressionSource source;
        if (options.dev_expressions) source = options.dev_expressions(s);
        predicted.push_back(predict_tags(model, s, provider, source));
      }
      const double f1 = token_f1(dev_gold, predicted, options.selection_element).f1();
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
