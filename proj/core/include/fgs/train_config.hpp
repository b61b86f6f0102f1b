#pragma once

#include <cstdint>

#include "fgs/corpus.hpp"

namespace fgs {

// Training hyperparameters shared by the tagger and the classifier.
struct TrainConfig {
  int epochs = 50;
  // SGD step size for the classifier. The perceptron tagger has no step size.
  double learning_rate = 0.1;
  // Step size recorded for transformer fine-tuning runs driven by exported
  // embeddings; carried through configs but unused by the desk-scale models.
  double finetune_learning_rate = 3e-5;
  double warmup = 0.1;
  int batch_size = 32;
  int max_sequence_length = 128;
  // Bernoulli feature-masking rate on pooled classifier inputs.
  double dropout = 0.3;
  double weight_decay = 0.01;
  std::uint64_t seed = 1;

  // Throws ValidationError on out-of-range values.
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

Json to_json(const TrainConfig& config);
// Missing keys keep their defaults.
TrainConfig train_config_from_json(const Json& object);

}  // namespace fgs
