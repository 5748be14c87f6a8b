#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "acro/core_types.hpp"
#include "acro/model.hpp"
#include "acro/pair_builder.hpp"

namespace acro {

// Which training strategies produced a checkpoint.
struct Provenance {
  bool tapt = false;
  bool dynamic_negatives = true;
  bool adversarial = false;
  int pseudo_rounds = 0;
  int tapt_epochs = 0;
  int epochs_trained = 0;
  double best_dev_f1 = 0.0;

  Json to_json() const;
  static Provenance from_json(const Json& j);
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// File layout: "ACROCKPT", u32 version, u64 header size, JSON header, then
// every tensor as little-endian float64 in header order.
struct Checkpoint {
  std::unique_ptr<EncoderContract> encoder;
  std::optional<BinaryHead> head;  // absent for encoder-only (TAPT) checkpoints
  Tokenizer tokenizer;
  TrainConfig config;
  Provenance provenance;

  bool has_head() const noexcept { return head.has_value(); }
  // Throws ValidationError for encoder-only checkpoints.
  ScoringModel classifier() const;
  // Copy of the encoder with a freshly initialized head.
  ScoringModel fresh_classifier(double dropout_rate, std::uint64_t seed) const;
};

void save_checkpoint(const std::filesystem::path& path, const EncoderContract& encoder, const BinaryHead* head,
                     const Tokenizer& tok, const TrainConfig& cfg, const Provenance& provenance);
void save_checkpoint(const std::filesystem::path& path, const ScoringModel& model, const Tokenizer& tok,
                     const TrainConfig& cfg, const Provenance& provenance);
// Throws MissingArtifactError if absent, ValidationError if malformed.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace acro
