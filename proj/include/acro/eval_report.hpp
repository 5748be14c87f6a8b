#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "acro/core_types.hpp"
#include "acro/data_ingest.hpp"
#include "acro/model.hpp"
#include "acro/pair_builder.hpp"

namespace acro {

// Scores every candidate with dropout off; ties go to the earlier candidate.
ScoredPrediction predict(const Sample& sample, const ScoringModel& model, const ExpansionDictionary& dict,
                         const Tokenizer& tok, std::size_t max_len = kDefaultMaxSeqLen);
std::vector<ScoredPrediction> predict_all(const std::vector<Sample>& samples, const ScoringModel& model,
                                          const ExpansionDictionary& dict, const Tokenizer& tok,
                                          std::size_t max_len = kDefaultMaxSeqLen);

// Per-class metrics over the union of gold and predicted expansion classes;
// macro values are unweighted means. A class never in gold has recall 0, a
// class never predicted has precision 0.
MetricsReport evaluate(const std::vector<Sample>& samples, const std::vector<ScoredPrediction>& predictions);
// Same, over parallel gold/predicted label lists.
MetricsReport evaluate_labels(const std::vector<std::string>& gold, const std::vector<std::string>& predicted);

// Most frequent training expansion per acronym; ties and unseen acronyms fall
// back to dictionary order.
std::vector<ScoredPrediction> mf_predictions(const std::vector<Sample>& train, const std::vector<Sample>& eval,
                                             const ExpansionDictionary& dict);
MetricsReport mf_baseline(const std::vector<Sample>& train, const std::vector<Sample>& eval,
                          const ExpansionDictionary& dict);

enum class ErrorCategory { unassigned, similar_expansions, insufficient_context, other };
std::string_view to_string(ErrorCategory c);

struct ErrorRecord {
  std::string sample_id;
  std::string sentence;
  std::string acronym;
  std::string gold;
  std::string predicted;
  std::vector<std::pair<std::string, double>> scores;
  ErrorCategory category = ErrorCategory::unassigned;
};

inline constexpr double kSimilarExpansionThreshold = 0.2;

std::size_t levenshtein(std::string_view a, std::string_view b);
// Edit distance of the normalized strings divided by their summed length.
double normalized_edit_distance(std::string_view a, std::string_view b);

// Uniform sample (seeded) of up to `sample_size` misclassified cases, reported
// in dataset order.
std::vector<ErrorRecord> error_report(const std::vector<Sample>& samples,
                                      const std::vector<ScoredPrediction>& predictions, std::size_t sample_size,
                                      std::uint64_t seed);

Json prediction_to_json(const ScoredPrediction& p);
ScoredPrediction prediction_from_json(const Json& j);
std::string dump_predictions(const std::vector<ScoredPrediction>& predictions);
std::vector<ScoredPrediction> parse_predictions(std::string_view text, std::string_view source_name = "<memory>");
std::vector<ScoredPrediction> load_predictions(const std::filesystem::path& path);

Json metrics_to_json(const MetricsReport& m);
Json error_report_to_json(const std::vector<ErrorRecord>& records);
std::string render_error_report(const std::vector<ErrorRecord>& records);

}  // namespace acro
