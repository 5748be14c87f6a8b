#include "acro/eval_report.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "acro/errors.hpp"
#include "acro/rng.hpp"

namespace acro {

ScoredPrediction predict(const Sample& sample, const ScoringModel& model, const ExpansionDictionary& dict,
                         const Tokenizer& tok, std::size_t max_len) {
  const auto& candidates = dict.candidates(sample.acronym());
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(model.score(format_input(c, sample, tok, max_len)));
  return make_prediction(sample.id, candidates, scores);
}

std::vector<ScoredPrediction> predict_all(const std::vector<Sample>& samples, const ScoringModel& model,
                                          const ExpansionDictionary& dict, const Tokenizer& tok,
                                          std::size_t max_len) {
  std::vector<ScoredPrediction> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(predict(s, model, dict, tok, max_len));
  return out;
}

MetricsReport evaluate_labels(const std::vector<std::string>& gold, const std::vector<std::string>& predicted) {
  if (gold.size() != predicted.size()) throw std::invalid_argument("evaluate: label count mismatch");
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  };
  std::map<std::string, Counts> classes;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = normalize_expansion(gold[i]);
    const auto p = normalize_expansion(predicted[i]);
    ++classes[g].support;
    if (g == p) {
      ++classes[g].tp;
      ++correct;
    } else {
      ++classes[g].fn;
      ++classes[p].fp;
    }
  }
  MetricsReport r;
  if (gold.empty()) return r;
  for (const auto& [name, c] : classes) {
    ClassMetrics m;
    m.support = c.support;
    m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = harmonic_f1(m.precision, m.recall);
    r.precision += m.precision;
    r.recall += m.recall;
    r.f1 += m.f1;
    r.per_expansion.emplace(name, m);
  }
  const auto n = static_cast<double>(classes.size());
  r.precision /= n;
  r.recall /= n;
  r.f1 /= n;
  r.f1_of_macro_pr = harmonic_f1(r.precision, r.recall);
  r.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  return r;
}

MetricsReport evaluate(const std::vector<Sample>& samples, const std::vector<ScoredPrediction>& predictions) {
  std::unordered_map<std::string, const ScoredPrediction*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.sample_id, &p);
  std::vector<std::string> gold, predicted;
  gold.reserve(samples.size());
  predicted.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.gold_expansion) throw ValidationError("evaluate: sample '" + s.id + "' has no gold expansion");
    auto it = by_id.find(s.id);
    if (it == by_id.end()) throw ValidationError("evaluate: missing prediction for sample '" + s.id + "'");
    gold.push_back(*s.gold_expansion);
    predicted.push_back(it->second->selected);
  }
  return evaluate_labels(gold, predicted);
}

std::vector<ScoredPrediction> mf_predictions(const std::vector<Sample>& train, const std::vector<Sample>& eval,
                                             const ExpansionDictionary& dict) {
  // acronym -> per-candidate frequency, indexed in dictionary order
  std::unordered_map<std::string, std::vector<double>> freq;
  for (const auto& s : train) {
    if (!s.gold_expansion || !dict.contains(s.acronym())) continue;
    auto idx = dict.index_of(s.acronym(), *s.gold_expansion);
    if (!idx) continue;
    auto& counts = freq[s.acronym()];
    counts.resize(dict.candidates(s.acronym()).size(), 0.0);
    counts[*idx] += 1.0;
  }
  std::vector<ScoredPrediction> out;
  out.reserve(eval.size());
  for (const auto& s : eval) {
    const auto& candidates = dict.candidates(s.acronym());
    std::vector<double> scores(candidates.size(), 0.0);
    if (auto it = freq.find(s.acronym()); it != freq.end()) {
      const double total = std::accumulate(it->second.begin(), it->second.end(), 0.0);
      for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = it->second[i] / total;
    }
    out.push_back(make_prediction(s.id, candidates, scores));
  }
  return out;
}

MetricsReport mf_baseline(const std::vector<Sample>& train, const std::vector<Sample>& eval,
                          const ExpansionDictionary& dict) {
  return evaluate(eval, mf_predictions(train, eval, dict));
}

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::similar_expansions: return "similar-expansions";
    case ErrorCategory::insufficient_context: return "insufficient-context";
    case ErrorCategory::other: return "other";
    case ErrorCategory::unassigned: break;
  }
  return "unassigned";
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
  const auto na = normalize_expansion(a);
  const auto nb = normalize_expansion(b);
  const auto total = na.size() + nb.size();
  if (total == 0) return 0.0;
  return static_cast<double>(levenshtein(na, nb)) / static_cast<double>(total);
}

std::vector<ErrorRecord> error_report(const std::vector<Sample>& samples,
                                      const std::vector<ScoredPrediction>& predictions, std::size_t sample_size,
                                      std::uint64_t seed) {
  std::unordered_map<std::string, const ScoredPrediction*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.sample_id, &p);
  std::vector<std::size_t> wrong;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.gold_expansion) continue;
    auto it = by_id.find(s.id);
    if (it == by_id.end()) continue;
    if (!same_expansion(*s.gold_expansion, it->second->selected)) wrong.push_back(i);
  }
  if (wrong.size() > sample_size) {
    Rng rng(derive_seed(seed, 0xE77ULL));
    rng.shuffle(wrong);
    wrong.resize(sample_size);
    std::sort(wrong.begin(), wrong.end());
  }
  std::vector<ErrorRecord> out;
  out.reserve(wrong.size());
  for (std::size_t i : wrong) {
    const auto& s = samples[i];
    const auto& p = *by_id.at(s.id);
    ErrorRecord r;
    r.sample_id = s.id;
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      if (t) r.sentence += ' ';
      r.sentence += s.tokens[t];
    }
    r.acronym = s.acronym();
    r.gold = *s.gold_expansion;
    r.predicted = p.selected;
    r.scores = p.scores;
    if (normalized_edit_distance(r.gold, r.predicted) < kSimilarExpansionThreshold) {
      r.category = ErrorCategory::similar_expansions;
    }
    out.push_back(std::move(r));
  }
  return out;
}

Json prediction_to_json(const ScoredPrediction& p) {
  Json j;
  j["id"] = p.sample_id;
  j["selected"] = p.selected;
  Json scores = Json::object();
  for (const auto& [e, s] : p.scores) scores[e] = s;
  j["scores"] = scores;
  return j;
}

ScoredPrediction prediction_from_json(const Json& j) {
  try {
    ScoredPrediction p;
    p.sample_id = j.at("id").get<std::string>();
    p.selected = j.at("selected").get<std::string>();
    for (const auto& [e, s] : j.at("scores").items()) p.scores.emplace_back(e, s.get<double>());
    if (!p.score_of(p.selected)) {
      throw ValidationError("prediction '" + p.sample_id + "': selected expansion not among scores");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed prediction record: ") + e.what());
  }
}

std::string dump_predictions(const std::vector<ScoredPrediction>& predictions) {
  Json arr = Json::array();
  for (const auto& p : predictions) arr.push_back(prediction_to_json(p));
  return arr.dump(1) + "\n";
}

std::vector<ScoredPrediction> parse_predictions(std::string_view text, std::string_view source_name) {
  const Json doc = parse_json_text(text, source_name);
  if (!doc.is_array()) throw ValidationError(std::string(source_name) + ": predictions must be a JSON array");
  std::vector<ScoredPrediction> out;
  for (const auto& rec : doc) out.push_back(prediction_from_json(rec));
  return out;
}

std::vector<ScoredPrediction> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_text_file(path), path.string());
}

Json metrics_to_json(const MetricsReport& m) {
  Json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["f1_of_macro_pr"] = m.f1_of_macro_pr;
  j["accuracy"] = m.accuracy;
  Json per = Json::object();
  for (const auto& [name, c] : m.per_expansion) {
    per[name] = {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
  }
  j["per_expansion"] = per;
  return j;
}

Json error_report_to_json(const std::vector<ErrorRecord>& records) {
  Json arr = Json::array();
  for (const auto& r : records) {
    Json j;
    j["id"] = r.sample_id;
    j["sentence"] = r.sentence;
    j["acronym"] = r.acronym;
    j["gold"] = r.gold;
    j["predicted"] = r.predicted;
    Json scores = Json::object();
    for (const auto& [e, s] : r.scores) scores[e] = s;
    j["scores"] = scores;
    j["category"] = to_string(r.category);
    arr.push_back(j);
  }
  return arr;
}

std::string render_error_report(const std::vector<ErrorRecord>& records) {
  std::ostringstream out;
  std::map<std::string_view, std::size_t> by_category;
  for (const auto& r : records) ++by_category[to_string(r.category)];
  out << "Misclassified samples: " << records.size() << "\n";
  for (const auto& [c, n] : by_category) out << "  " << c << ": " << n << "\n";
  for (const auto& r : records) {
    out << "\n[" << r.sample_id << "] " << r.acronym << " (" << to_string(r.category) << ")\n";
    out << "  sentence:  " << r.sentence << "\n";
    out << "  gold:      " << r.gold << "\n";
    out << "  predicted: " << r.predicted << "\n";
    for (const auto& [e, s] : r.scores) out << "    " << s << "  " << e << "\n";
  }
  return out.str();
}

}  // namespace acro
