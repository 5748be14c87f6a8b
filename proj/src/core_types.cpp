#include "acro/core_types.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "acro/errors.hpp"

namespace acro {

std::string normalize_expansion(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool same_expansion(std::string_view a, std::string_view b) {
  return normalize_expansion(a) == normalize_expansion(b);
}

void ExpansionDictionary::add(std::string acronym, std::vector<std::string> expansions) {
  if (acronym.empty()) throw ValidationError("dictionary: empty acronym key");
  if (index_.contains(acronym)) throw ValidationError("dictionary: duplicate acronym '" + acronym + "'");
  if (expansions.empty()) throw ValidationError("dictionary: acronym '" + acronym + "' has no expansions");
  std::vector<std::string> seen;
  seen.reserve(expansions.size());
  for (const auto& e : expansions) {
    auto norm = normalize_expansion(e);
    if (norm.empty()) throw ValidationError("dictionary: empty expansion for '" + acronym + "'");
    if (std::find(seen.begin(), seen.end(), norm) != seen.end()) {
      throw ValidationError("dictionary: duplicate expansion '" + e + "' for acronym '" + acronym + "'");
    }
    seen.push_back(std::move(norm));
  }
  index_.emplace(acronym, entries_.size());
  entries_.emplace_back(std::move(acronym), std::move(expansions));
}

bool ExpansionDictionary::contains(std::string_view acronym) const {
  return index_.contains(std::string(acronym));
}

const std::vector<std::string>& ExpansionDictionary::candidates(std::string_view acronym) const {
  auto it = index_.find(std::string(acronym));
  if (it == index_.end()) throw MissingAcronymError(std::string(acronym));
  return entries_[it->second].second;
}

std::optional<std::size_t> ExpansionDictionary::index_of(std::string_view acronym,
                                                         std::string_view expansion) const {
  auto it = index_.find(std::string(acronym));
  if (it == index_.end()) return std::nullopt;
  const auto& cands = entries_[it->second].second;
  const auto norm = normalize_expansion(expansion);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (normalize_expansion(cands[i]) == norm) return i;
  }
  return std::nullopt;
}

std::optional<double> ScoredPrediction::score_of(std::string_view expansion) const {
  const auto norm = normalize_expansion(expansion);
  for (const auto& [e, s] : scores) {
    if (normalize_expansion(e) == norm) return s;
  }
  return std::nullopt;
}

double ScoredPrediction::max_score() const {
  if (scores.empty()) throw std::logic_error("ScoredPrediction without scores");
  double best = scores.front().second;
  for (const auto& [e, s] : scores) best = std::max(best, s);
  return best;
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax_first: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

ScoredPrediction make_prediction(std::string sample_id, const std::vector<std::string>& candidates,
                                 std::span<const double> scores) {
  if (candidates.size() != scores.size() || candidates.empty()) {
    throw std::invalid_argument("make_prediction: candidate/score size mismatch");
  }
  ScoredPrediction p;
  p.sample_id = std::move(sample_id);
  p.scores.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) p.scores.emplace_back(candidates[i], scores[i]);
  p.selected = candidates[argmax_first(scores)];
  return p;
}

std::vector<std::string> TrainConfig::violations() const {
  std::vector<std::string> out;
  if (batch_size < 1) out.emplace_back("batch_size must be >= 1");
  if (epochs < 0) out.emplace_back("epochs must be >= 0");
  if (negatives_per_batch < 0) out.emplace_back("negatives_per_batch must be >= 0");
  if (!(lr_min <= lr_encoder)) out.emplace_back("lr_min must not exceed lr_encoder");
  if (!(lr_min <= lr_head)) out.emplace_back("lr_min must not exceed lr_head");
  if (!(lr_decay_factor > 0.0 && lr_decay_factor < 1.0)) out.emplace_back("lr_decay_factor must be in (0,1)");
  if (!(adversarial_epsilon >= 0.0)) out.emplace_back("adversarial_epsilon must be >= 0");
  if (!(pseudo_threshold > 0.0 && pseudo_threshold < 1.0)) out.emplace_back("pseudo_threshold must be in (0,1)");
  if (!(mask_rate >= 0.0 && mask_rate <= 1.0)) out.emplace_back("mask_rate must be in [0,1]");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) out.emplace_back("dropout_rate must be in [0,1)");
  if (pseudo_rounds < 0) out.emplace_back("pseudo_rounds must be >= 0");
  if (max_seq_len < 8) out.emplace_back("max_seq_len must be >= 8");
  if (min_count < 1) out.emplace_back("min_count must be >= 1");
  if (tapt_epochs < 0) out.emplace_back("tapt_epochs must be >= 0");
  if (!(tapt_lr > 0.0)) out.emplace_back("tapt_lr must be > 0");
  return out;
}

void TrainConfig::validate() const {
  auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid TrainConfig:";
  for (const auto& s : v) msg += " " + s + ";";
  throw ValidationError(msg);
}

double harmonic_f1(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

std::vector<std::string> validate_sample(const Sample& sample, const ExpansionDictionary& dict) {
  std::vector<std::string> out;
  const std::string where = "sample '" + sample.id + "': ";
  if (sample.tokens.empty()) {
    out.push_back(where + "empty token list");
    return out;
  }
  for (std::size_t i = 0; i < sample.tokens.size(); ++i) {
    if (sample.tokens[i].empty()) out.push_back(where + "empty token at position " + std::to_string(i));
  }
  if (sample.acronym_index >= sample.tokens.size()) {
    out.push_back(where + "acronym index " + std::to_string(sample.acronym_index) + " out of range [0," +
                  std::to_string(sample.tokens.size()) + ")");
    return out;
  }
  if (sample.gold_expansion) {
    const auto& acronym = sample.tokens[sample.acronym_index];
    if (!dict.contains(acronym)) {
      out.push_back(where + "acronym '" + acronym + "' not in dictionary");
    } else if (!dict.index_of(acronym, *sample.gold_expansion)) {
      out.push_back(where + "unknown expansion '" + *sample.gold_expansion + "' for acronym '" + acronym + "'");
    }
  }
  return out;
}

}  // namespace acro
