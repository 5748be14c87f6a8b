#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "acro/core_types.hpp"
#include "acro/model.hpp"
#include "acro/pair_builder.hpp"
#include "acro/train_engine.hpp"

namespace acro {

struct PseudoSample {
  Sample underlying;  // gold absent
  std::string assigned_expansion;
  double confidence = 0.0;
  int source_round = 1;

  // The underlying sample labeled with the assigned expansion.
  Sample as_labeled() const;
  friend bool operator==(const PseudoSample&, const PseudoSample&) = default;
};

// Keeps samples whose top candidate score is strictly above `threshold`,
// labeled with that candidate. Gold labels on the inputs are ignored.
std::vector<PseudoSample> harvest_from_predictions(const std::vector<Sample>& unlabeled,
                                                   const std::vector<ScoredPrediction>& predictions,
                                                   double threshold, int round);
std::vector<PseudoSample> harvest(const ScoringModel& model, const std::vector<Sample>& unlabeled,
                                  const ExpansionDictionary& dict, const Tokenizer& tok, double threshold,
                                  int round = 1, std::size_t max_len = kDefaultMaxSeqLen);

// Trains `initial` (a fresh model, not the harvesting classifier) on
// train + pseudo with the same config. Throws ValidationError when a pseudo id
// collides with a training id.
TrainResult merge_and_retrain(const std::vector<Sample>& train_samples, const std::vector<PseudoSample>& pseudo,
                              const std::vector<Sample>& dev_samples, const ExpansionDictionary& dict,
                              const Tokenizer& tok, const TrainConfig& cfg, ScoringModel initial,
                              const TrainOptions& options = {});

// Dataset schema plus "confidence" and "round".
std::string dump_pseudo(const std::vector<PseudoSample>& pseudo);
std::vector<PseudoSample> parse_pseudo(std::string_view text, std::string_view source_name = "<memory>");
void save_pseudo(const std::filesystem::path& path, const std::vector<PseudoSample>& pseudo);
std::vector<PseudoSample> load_pseudo(const std::filesystem::path& path);

}  // namespace acro
