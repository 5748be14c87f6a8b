#include "acro/train_engine.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "acro/errors.hpp"
#include "acro/eval_report.hpp"
#include "acro/rng.hpp"

namespace acro {

std::vector<BatchPlan> plan_batches(std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                                    std::uint64_t epoch_seed, int epoch) {
  std::vector<std::size_t> positives, pool;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? positives : pool).push_back(i);
  if (positives.empty()) throw ValidationError("plan_batches: no positive pairs");

  Rng rng(epoch_seed);
  rng.shuffle(positives);
  rng.shuffle(pool);

  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  const auto quota = static_cast<std::size_t>(cfg.negatives_per_batch);
  const std::size_t n_batches = (positives.size() + bs - 1) / bs;
  std::vector<BatchPlan> plans;
  plans.reserve(n_batches);
  std::size_t cursor = 0, drawn = 0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    BatchPlan plan;
    plan.epoch = epoch;
    plan.step = static_cast<int>(b);
    const std::size_t begin = b * bs;
    const std::size_t end = std::min(begin + bs, positives.size());
    plan.positives.assign(positives.begin() + static_cast<std::ptrdiff_t>(begin),
                          positives.begin() + static_cast<std::ptrdiff_t>(end));
    std::size_t want = quota;
    if (end - begin < bs) {
      want = ((end - begin) * quota + bs - 1) / bs;
      if (drawn < pool.size()) want = std::max(want, std::min(quota, pool.size() - drawn));
    }
    want = std::min(want, pool.size());
    drawn += want;
    while (plan.negatives.size() < want) {
      if (cursor == pool.size()) {
        // Start a new pass; keep this batch's picks out of its front.
        rng.shuffle(pool);
        std::stable_partition(pool.begin(), pool.end(), [&](std::size_t idx) {
          return std::find(plan.negatives.begin(), plan.negatives.end(), idx) == plan.negatives.end();
        });
        cursor = 0;
      }
      plan.negatives.push_back(pool[cursor++]);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::vector<BatchPlan> plan_static_batches(std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                                           std::uint64_t epoch_seed, int epoch) {
  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(epoch_seed);
  rng.shuffle(order);
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  std::vector<BatchPlan> plans;
  for (std::size_t begin = 0; begin < order.size(); begin += bs) {
    BatchPlan plan;
    plan.epoch = epoch;
    plan.step = static_cast<int>(plans.size());
    for (std::size_t i = begin; i < std::min(begin + bs, order.size()); ++i) {
      (labels[order[i]] ? plan.positives : plan.negatives).push_back(order[i]);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

double binary_loss(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("binary_loss: length mismatch");
  if (scores.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], kScoreClamp, 1.0 - kScoreClamp);
    total += labels[i] ? -std::log(s) : -std::log(1.0 - s);
  }
  return total / static_cast<double>(scores.size());
}

namespace {

DropoutContext dropout_for(const BatchData& batch, std::size_t i) {
  return DropoutContext{batch.dropout_rate, batch.dropout_keys.empty() ? 0 : batch.dropout_keys[i]};
}

}  // namespace

double batch_forward_backward(ScoringModel& model, const BatchData& batch) {
  const std::size_t n = batch.inputs.size();
  if (n == 0) return 0.0;
  std::vector<double> scores(n);
  ScoringModel::Trace trace;
  for (std::size_t i = 0; i < n; ++i) {
    const auto drop = dropout_for(batch, i);
    scores[i] = model.forward(*batch.inputs[i], &drop, trace);
    // d(mean BCE)/d(logit) = (s - y) / n
    const double d_logit = (scores[i] - static_cast<double>(batch.labels[i])) / static_cast<double>(n);
    model.backward(*batch.inputs[i], trace, d_logit);
  }
  return binary_loss(scores, batch.labels);
}

double batch_loss(const ScoringModel& model, const BatchData& batch) {
  std::vector<double> scores(batch.inputs.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto drop = dropout_for(batch, i);
    scores[i] = model.score(*batch.inputs[i], &drop);
  }
  return binary_loss(scores, batch.labels);
}

AdversarialResult adversarial_step(ScoringModel& model, const BatchData& batch, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("adversarial_step: epsilon must be positive");
  Parameter& table = model.encoder().embedding_table();
  const double norm = table.grad.norm();
  AdversarialResult result;
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    result.skipped = true;
    return result;
  }
  const Matrix saved = table.value;
  const Matrix delta = (epsilon / norm) * table.grad;
  result.delta_norm = delta.norm();
  table.value += delta;
  try {
    result.loss = batch_forward_backward(model, batch);
  } catch (...) {
    table.value = saved;
    throw;
  }
  table.value = saved;
  return result;
}

TrainState TrainState::initial(const TrainConfig& cfg) {
  TrainState s;
  s.lr_encoder_current = cfg.lr_encoder;
  s.lr_head_current = cfg.lr_head;
  return s;
}

TrainState lr_schedule_update(TrainState state, double dev_f1, const TrainConfig& cfg) {
  if (dev_f1 > state.best_dev_f1) {
    state.best_dev_f1 = dev_f1;
    return state;
  }
  state.lr_encoder_current = std::max(state.lr_encoder_current * cfg.lr_decay_factor, cfg.lr_min);
  state.lr_head_current = std::max(state.lr_head_current * cfg.lr_decay_factor, cfg.lr_min);
  return state;
}

Json epoch_record_to_json(const EpochRecord& r) {
  Json j;
  j["epoch"] = r.epoch;
  j["train_loss"] = r.train_loss;
  j["dev_precision"] = r.dev.precision;
  j["dev_recall"] = r.dev.recall;
  j["dev_f1"] = r.dev.f1;
  j["dev_f1_of_macro_pr"] = r.dev.f1_of_macro_pr;
  j["dev_accuracy"] = r.dev.accuracy;
  j["lr_encoder"] = r.lr_encoder;
  j["lr_head"] = r.lr_head;
  return j;
}

TrainResult train(const std::vector<Sample>& train_samples, const std::vector<Sample>& dev_samples,
                  const ExpansionDictionary& dict, const Tokenizer& tok, const TrainConfig& cfg,
                  ScoringModel initial, const TrainOptions& options) {
  cfg.validate();
  for (const auto& s : train_samples) {
    if (!s.gold_expansion) throw ValidationError("train: sample '" + s.id + "' has no gold expansion");
  }
  if (initial.encoder().vocab_size() != tok.size()) {
    throw ValidationError("train: model vocabulary does not match tokenizer");
  }
  const auto max_len = static_cast<std::size_t>(cfg.max_seq_len);
  if (max_len > initial.encoder().max_positions()) {
    throw ValidationError("train: max_seq_len exceeds the encoder's max_positions");
  }

  const auto pairs = build_all_pairs(train_samples, dict, max_len);
  std::vector<FormattedInput> inputs;
  std::vector<std::uint8_t> labels;
  inputs.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    inputs.push_back(encode_pair(p, tok));
    labels.push_back(*p.label);
  }

  TrainResult result{std::move(initial), TrainState::initial(cfg), 0};
  if (cfg.epochs == 0 || pairs.empty()) return result;

  ScoringModel& model = result.model;
  AdamOptimizer optimizer(cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  const bool adversarial = options.adversarial && cfg.adversarial_epsilon > 0.0;
  bool warned_zero_gradient = false;
  std::vector<Matrix> best_params;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto epoch_seed = derive_seed(cfg.seed, 0xE90C4ULL, static_cast<std::uint64_t>(epoch));
    const auto plans = cfg.dynamic_negatives ? plan_batches(labels, cfg, epoch_seed, epoch)
                                             : plan_static_batches(labels, cfg, epoch_seed, epoch);
    EpochRecord record;
    record.epoch = epoch;
    record.lr_encoder = result.state.lr_encoder_current;
    record.lr_head = result.state.lr_head_current;

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const auto& plan : plans) {
      BatchData batch;
      batch.dropout_rate = cfg.dropout_rate;
      auto add = [&](std::size_t idx) {
        batch.inputs.push_back(&inputs[idx]);
        batch.labels.push_back(labels[idx]);
        batch.dropout_keys.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch),
                                                 static_cast<std::uint64_t>(plan.step), batch.inputs.size()));
      };
      for (auto idx : plan.positives) add(idx);
      for (auto idx : plan.negatives) add(idx);

      model.zero_grad();
      const double loss = batch_forward_backward(model, batch);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training diverged: non-finite loss at epoch " << epoch << " step " << plan.step
            << " (lr_encoder=" << record.lr_encoder << ", lr_head=" << record.lr_head << ")";
        throw DivergenceError(msg.str());
      }
      if (adversarial) {
        const auto adv = adversarial_step(model, batch, cfg.adversarial_epsilon);
        if (adv.skipped && !warned_zero_gradient) {
          std::clog << "adversarial step skipped: zero embedding gradient (epoch " << epoch << ", step "
                    << plan.step << ")\n";
          warned_zero_gradient = true;
        }
        if (!std::isfinite(adv.loss)) throw DivergenceError("training diverged: non-finite adversarial loss");
      }
      optimizer.step(model.parameters(), result.state.lr_encoder_current, result.state.lr_head_current);
      loss_sum += loss * static_cast<double>(batch.inputs.size());
      loss_count += batch.inputs.size();
    }
    record.train_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;

    if (!dev_samples.empty()) {
      record.dev = evaluate(dev_samples, predict_all(dev_samples, model, dict, tok, max_len));
      const bool improved = record.dev.f1 > result.state.best_dev_f1;
      result.state = lr_schedule_update(std::move(result.state), record.dev.f1, cfg);
      if (improved) {
        best_params = snapshot_parameters(model);
        result.best_epoch = epoch;
      }
    } else {
      result.best_epoch = epoch;
    }
    result.state.epoch_history.push_back(record);
    if (options.log) *options.log << epoch_record_to_json(record).dump() << "\n" << std::flush;
    if (options.on_epoch) options.on_epoch(record);
  }
  if (!best_params.empty()) restore_parameters(model, best_params);
  return result;
}

}  // namespace acro
