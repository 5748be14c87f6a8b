#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace acro {

// Lower-cases ASCII letters, trims, and collapses internal whitespace runs to
// one space. Expansion strings are compared in this form everywhere.
std::string normalize_expansion(std::string_view text);

bool same_expansion(std::string_view a, std::string_view b);

struct Sample {
  std::string id;
  std::vector<std::string> tokens;
  std::size_t acronym_index = 0;
  std::optional<std::string> gold_expansion;

  const std::string& acronym() const { return tokens.at(acronym_index); }
  bool labeled() const noexcept { return gold_expansion.has_value(); }

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Acronym -> ordered candidate expansions. Acronym keys are matched exactly;
// candidate order is load order and is the tie-break authority.
class ExpansionDictionary {
 public:
  ExpansionDictionary() = default;

  // Throws ValidationError on empty list or duplicate (normalized) expansion.
  void add(std::string acronym, std::vector<std::string> expansions);

  bool contains(std::string_view acronym) const;
  // Throws MissingAcronymError.
  const std::vector<std::string>& candidates(std::string_view acronym) const;
  // Index of `expansion` among the acronym's candidates (normalized match).
  std::optional<std::size_t> index_of(std::string_view acronym, std::string_view expansion) const;

  // (acronym, expansions) in insertion order.
  const std::vector<std::pair<std::string, std::vector<std::string>>>& entries() const noexcept {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const ExpansionDictionary& a, const ExpansionDictionary& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Closed index pair into a formatted token sequence: positions of the
// acronym-start and acronym-end markers.
struct AcronymSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const AcronymSpan&, const AcronymSpan&) = default;
};

struct PairInstance {
  std::string sample_id;
  std::string expansion;
  std::vector<std::string> input_tokens;
  AcronymSpan acronym_span;
  // Number of leading tokens in segment 0 ([CLS] expansion [SEP]).
  std::size_t segment0_length = 0;
  // Absent for unlabeled samples.
  std::optional<std::uint8_t> label;
};

struct ScoredPrediction {
  std::string sample_id;
  // Candidate scores in dictionary order.
  std::vector<std::pair<std::string, double>> scores;
  std::string selected;

  std::optional<double> score_of(std::string_view expansion) const;
  double max_score() const;
  friend bool operator==(const ScoredPrediction&, const ScoredPrediction&) = default;
};

// Argmax with ties resolved to the lowest index. Requires non-empty input.
std::size_t argmax_first(std::span<const double> values);

// Builds a prediction from candidate scores given in dictionary order.
ScoredPrediction make_prediction(std::string sample_id, const std::vector<std::string>& candidates,
                                 std::span<const double> scores);

struct TrainConfig {
  int batch_size = 32;
  int epochs = 15;
  double lr_encoder = 1.0e-5;
  double lr_head = 5.0e-4;
  double lr_decay_factor = 0.1;
  double lr_min = 5.0e-7;
  int negatives_per_batch = 32;
  double adversarial_epsilon = 1.0;
  double pseudo_threshold = 0.95;
  double mask_rate = 0.15;
  double dropout_rate = 0.1;
  std::uint64_t seed = 0;

  // Choices the method leaves open.
  bool dynamic_negatives = true;
  int pseudo_rounds = 1;
  int max_seq_len = 128;
  int min_count = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1.0e-8;
  int tapt_epochs = 10;
  double tapt_lr = 1.0e-4;

  // Empty when valid.
  std::vector<std::string> violations() const;
  // Throws ValidationError listing every violation.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

// Macro-averaged over expansion classes.
struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Harmonic mean of macro precision and macro recall.
  double f1_of_macro_pr = 0.0;
  double accuracy = 0.0;
  std::map<std::string, ClassMetrics> per_expansion;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

double harmonic_f1(double precision, double recall);

// Empty iff the sample satisfies its invariants against `dict`.
std::vector<std::string> validate_sample(const Sample& sample, const ExpansionDictionary& dict);

}  // namespace acro
