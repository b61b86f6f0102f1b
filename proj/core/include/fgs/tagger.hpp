#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fgs/augment.hpp"
#include "fgs/embedding.hpp"
#include "fgs/matrix.hpp"
#include "fgs/tagscheme.hpp"
#include "fgs/train_config.hpp"
#include "fgs/viterbi.hpp"

namespace fgs {

// Linear-chain tagger: emission score of label y at token i is
// emissions.row(y) . x_i, plus transitions(y_{i-1}, y_i) between tokens.
struct TaggerModel {
  TagScheme scheme;
  AugmentMode mode = AugmentMode::Original;
  std::vector<Tag> labels;  // label_inventory(scheme); index 0 is O
  Matrix emissions;         // L x d
  Matrix transitions;       // L x L
  TransitionMask mask;
  int max_sequence_length = 128;

  static TaggerModel zeros(const TagScheme& scheme, std::size_t dimension,
                           AugmentMode mode = AugmentMode::Original);

  std::size_t dimension() const { return emissions.cols(); }
  int label_index(const Tag& tag) const;

  bool operator==(const TaggerModel& other) const {
    return scheme == other.scheme && mode == other.mode && labels == other.labels &&
           emissions == other.emissions && transitions == other.transitions &&
           max_sequence_length == other.max_sequence_length;
  }
};

// One tagging input: augmented tokens and gold label indices aligned to them.
struct TaggerInstance {
  std::string key;
  std::vector<std::string> tokens;
  std::vector<int> labels;
  // Augmented position -> original token index, -1 for bracket tokens.
  std::vector<int> original_index;
};

TaggerInstance make_tagger_instance(const Sentence& sentence, const TagScheme& scheme,
                                    AugmentMode mode,
                                    const ExpressionSource& expressions = {});

// n x L emission scores for the first min(n, max_sequence_length) tokens.
Matrix emission_scores(const TaggerModel& model, const EmbeddingMatrix& embedded);

// Tags for an (already augmented) token sequence; tokens past the maximum
// sequence length are tagged O.
TagSequence predict_sequence(const TaggerModel& model, std::span<const std::string> tokens,
                             std::string_view key, const EmbeddingProvider& provider);

// Tags in original token coordinates: the sentence is augmented per the
// model's mode, tagged, and bracket positions are dropped. Output is valid
// BIO for the model's scheme.
TagSequence predict_tags(const TaggerModel& model, const Sentence& sentence,
                         const EmbeddingProvider& provider,
                         const ExpressionSource& expressions = {});

// Supplies the expression source used when augmenting a sentence.
using ExpressionSourceFn = std::function<ExpressionSource(const Sentence&)>;

struct TaggerTrainOptions {
  // When set, the averaged weights after each epoch are scored on dev and
  // the best epoch (token F1 of `selection_element`) is returned.
  const Corpus* dev = nullptr;
  Element selection_element = Element::Target;
  // Expression source for dev sentences; gold when empty.
  ExpressionSourceFn dev_expressions;
  // Per-epoch dev F1, filled when dev is given.
  std::vector<double>* dev_history = nullptr;
};

// Averaged structured perceptron with BIO-constrained Viterbi decoding.
// Sentences are reshuffled every epoch from config.seed; the result is a
// deterministic function of (corpus, scheme, mode, provider, config).
TaggerModel train_tagger(const Corpus& corpus, const TagScheme& scheme, AugmentMode mode,
                         const EmbeddingProvider& provider, const TrainConfig& config,
                         const TaggerTrainOptions& options = {});

}  // namespace fgs
