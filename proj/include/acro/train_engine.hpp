#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "acro/core_types.hpp"
#include "acro/model.hpp"
#include "acro/optimizer.hpp"
#include "acro/pair_builder.hpp"

namespace acro {

// One optimization step's worth of pair indices.
struct BatchPlan {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  int epoch = 0;
  int step = 0;
};

// Dynamic negative selection. Positives are shuffled and cut into batches of
// cfg.batch_size; each batch then draws cfg.negatives_per_batch negatives
// without replacement from an epoch-shuffled pool, reshuffling the pool when
// it runs dry. A final partial batch of p positives draws
// ceil(p * negatives / batch_size), raised to finish the first pass over the
// pool when that fits in negatives_per_batch. No batch holds more negatives
// than the pool, so none repeats within a batch.
// Throws ValidationError if there are no positives.
std::vector<BatchPlan> plan_batches(std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                                    std::uint64_t epoch_seed, int epoch = 0);
// Plain shuffled batches of cfg.batch_size pairs, labels mixed as they come.
std::vector<BatchPlan> plan_static_batches(std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                                           std::uint64_t epoch_seed, int epoch = 0);

inline constexpr double kScoreClamp = 1e-7;

// Mean binary cross-entropy; scores are clamped to [1e-7, 1 - 1e-7].
double binary_loss(std::span<const double> scores, std::span<const std::uint8_t> labels);

// A batch ready for the model: inputs, labels, and one dropout key per input.
struct BatchData {
  std::vector<const FormattedInput*> inputs;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint64_t> dropout_keys;
  double dropout_rate = 0.0;
};

// Forward and backward over the batch, accumulating gradients of the mean
// BCE loss. Returns that loss.
double batch_forward_backward(ScoringModel& model, const BatchData& batch);
// Forward only, with the same dropout masks a training pass would use.
double batch_loss(const ScoringModel& model, const BatchData& batch);

struct AdversarialResult {
  double loss = 0.0;  // loss at the perturbed embeddings
  double delta_norm = 0.0;
  bool skipped = false;  // gradient norm was zero
};

// Fast-gradient perturbation of the token embedding table. Expects the
// embedding-table gradient of the clean batch loss to be present. Adds
// epsilon * g / |g|, runs a second forward/backward that accumulates into the
// existing gradients, then restores the table bit-for-bit.
AdversarialResult adversarial_step(ScoringModel& model, const BatchData& batch, double epsilon);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  MetricsReport dev;
  double lr_encoder = 0.0;
  double lr_head = 0.0;
};

struct TrainState {
  double lr_encoder_current = 0.0;
  double lr_head_current = 0.0;
  double best_dev_f1 = -std::numeric_limits<double>::infinity();
  std::vector<EpochRecord> epoch_history;

  static TrainState initial(const TrainConfig& cfg);
};

// Strict improvement keeps the rates; otherwise both decay by
// cfg.lr_decay_factor, floored at cfg.lr_min.
TrainState lr_schedule_update(TrainState state, double dev_f1, const TrainConfig& cfg);

struct TrainOptions {
  bool adversarial = false;
  // One JSON object per epoch when set.
  std::ostream* log = nullptr;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  ScoringModel model;  // parameters from the best dev-F1 epoch
  TrainState state;
  int best_epoch = 0;  // 0 when no epoch ran
};

// Every training sample must be labeled. With an empty dev set the schedule
// is never updated and the last epoch is kept.
TrainResult train(const std::vector<Sample>& train_samples, const std::vector<Sample>& dev_samples,
                  const ExpansionDictionary& dict, const Tokenizer& tok, const TrainConfig& cfg,
                  ScoringModel initial, const TrainOptions& options = {});

Json epoch_record_to_json(const EpochRecord& r);

}  // namespace acro
