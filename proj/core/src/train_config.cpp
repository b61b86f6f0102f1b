#include "fgs/train_config.hpp"

#include "fgs/error.hpp"

namespace fgs {

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be at least 1");
  if (!(warmup >= 0.0 && warmup < 1.0)) throw ValidationError("warmup must be in [0, 1)");
  if (batch_size < 1) throw ValidationError("batch size must be at least 1");
  if (max_sequence_length < 2) {
    throw ValidationError("max sequence length must be at least 2");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must be in [0, 1)");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight decay must be non-negative");
}

Json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"finetune_learning_rate", c.finetune_learning_rate},
          {"warmup", c.warmup},
          {"batch_size", c.batch_size},
          {"max_sequence_length", c.max_sequence_length},
          {"dropout", c.dropout},
          {"weight_decay", c.weight_decay},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const Json& object) {
  if (!object.is_object()) throw ValidationError("train config: expected an object");
  TrainConfig c;
  try {
    c.epochs = object.value("epochs", c.epochs);
    c.learning_rate = object.value("learning_rate", c.learning_rate);
    c.finetune_learning_rate = object.value("finetune_learning_rate", c.finetune_learning_rate);
    c.warmup = object.value("warmup", c.warmup);
    c.batch_size = object.value("batch_size", c.batch_size);
    c.max_sequence_length = object.value("max_sequence_length", c.max_sequence_length);
    c.dropout = object.value("dropout", c.dropout);
    c.weight_decay = object.value("weight_decay", c.weight_decay);
    c.seed = object.value("seed", c.seed);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("train config: ") + e.what());
  }
  return c;
}

}  // namespace fgs
