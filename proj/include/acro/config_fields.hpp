#pragma once

#include "acro/core_types.hpp"

namespace acro {

// Calls f(name, member pointer) for every TrainConfig field, in file order.
template <typename F>
inline void for_each_config_field(F&& f) {
  f("batch_size", &TrainConfig::batch_size);
  f("epochs", &TrainConfig::epochs);
  f("lr_encoder", &TrainConfig::lr_encoder);
  f("lr_head", &TrainConfig::lr_head);
  f("lr_decay_factor", &TrainConfig::lr_decay_factor);
  f("lr_min", &TrainConfig::lr_min);
  f("negatives_per_batch", &TrainConfig::negatives_per_batch);
  f("adversarial_epsilon", &TrainConfig::adversarial_epsilon);
  f("pseudo_threshold", &TrainConfig::pseudo_threshold);
  f("mask_rate", &TrainConfig::mask_rate);
  f("dropout_rate", &TrainConfig::dropout_rate);
  f("seed", &TrainConfig::seed);
  f("dynamic_negatives", &TrainConfig::dynamic_negatives);
  f("pseudo_rounds", &TrainConfig::pseudo_rounds);
  f("max_seq_len", &TrainConfig::max_seq_len);
  f("min_count", &TrainConfig::min_count);
  f("adam_beta1", &TrainConfig::adam_beta1);
  f("adam_beta2", &TrainConfig::adam_beta2);
  f("adam_eps", &TrainConfig::adam_eps);
  f("tapt_epochs", &TrainConfig::tapt_epochs);
  f("tapt_lr", &TrainConfig::tapt_lr);
}

}  // namespace acro
