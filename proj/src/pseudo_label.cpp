#include "acro/pseudo_label.hpp"

#include <unordered_map>
#include <unordered_set>

#include "acro/errors.hpp"
#include "acro/eval_report.hpp"

namespace acro {

Sample PseudoSample::as_labeled() const {
  Sample s = underlying;
  s.gold_expansion = assigned_expansion;
  return s;
}

std::vector<PseudoSample> harvest_from_predictions(const std::vector<Sample>& unlabeled,
                                                   const std::vector<ScoredPrediction>& predictions,
                                                   double threshold, int round) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("harvest: threshold must be in (0,1)");
  std::unordered_map<std::string, const ScoredPrediction*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.sample_id, &p);
  std::vector<PseudoSample> out;
  for (const auto& s : unlabeled) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) throw ValidationError("harvest: missing prediction for sample '" + s.id + "'");
    const auto& p = *it->second;
    const double confidence = *p.score_of(p.selected);
    if (!(confidence > threshold)) continue;
    PseudoSample ps;
    ps.underlying = s;
    ps.underlying.gold_expansion.reset();
    ps.assigned_expansion = p.selected;
    ps.confidence = confidence;
    ps.source_round = round;
    out.push_back(std::move(ps));
  }
  return out;
}

std::vector<PseudoSample> harvest(const ScoringModel& model, const std::vector<Sample>& unlabeled,
                                  const ExpansionDictionary& dict, const Tokenizer& tok, double threshold, int round,
                                  std::size_t max_len) {
  return harvest_from_predictions(unlabeled, predict_all(unlabeled, model, dict, tok, max_len), threshold, round);
}

TrainResult merge_and_retrain(const std::vector<Sample>& train_samples, const std::vector<PseudoSample>& pseudo,
                              const std::vector<Sample>& dev_samples, const ExpansionDictionary& dict,
                              const Tokenizer& tok, const TrainConfig& cfg, ScoringModel initial,
                              const TrainOptions& options) {
  std::unordered_set<std::string> ids;
  for (const auto& s : train_samples) ids.insert(s.id);
  std::vector<Sample> merged = train_samples;
  merged.reserve(train_samples.size() + pseudo.size());
  for (const auto& p : pseudo) {
    if (!ids.insert(p.underlying.id).second) {
      throw ValidationError("merge_and_retrain: pseudo sample id '" + p.underlying.id + "' collides with training data");
    }
    merged.push_back(p.as_labeled());
  }
  return train(merged, dev_samples, dict, tok, cfg, std::move(initial), options);
}

std::string dump_pseudo(const std::vector<PseudoSample>& pseudo) {
  Json arr = Json::array();
  for (const auto& p : pseudo) {
    Json j = sample_to_json(p.as_labeled());
    j["confidence"] = p.confidence;
    j["round"] = p.source_round;
    arr.push_back(j);
  }
  return arr.dump(1) + "\n";
}

std::vector<PseudoSample> parse_pseudo(std::string_view text, std::string_view source_name) {
  const Json doc = parse_json_text(text, source_name);
  if (!doc.is_array()) throw ValidationError(std::string(source_name) + ": pseudo dataset must be a JSON array");
  std::vector<PseudoSample> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    Sample s = sample_from_json(doc[i], i);
    if (!s.gold_expansion) throw ValidationError(std::string(source_name) + ": pseudo record without expansion");
    auto conf = doc[i].find("confidence");
    auto round = doc[i].find("round");
    if (conf == doc[i].end() || !conf->is_number() || round == doc[i].end() || !round->is_number_integer()) {
      throw ValidationError(std::string(source_name) + ": pseudo record '" + s.id + "' needs confidence and round");
    }
    PseudoSample p;
    p.assigned_expansion = *s.gold_expansion;
    s.gold_expansion.reset();
    p.underlying = std::move(s);
    p.confidence = conf->get<double>();
    p.source_round = round->get<int>();
    out.push_back(std::move(p));
  }
  return out;
}

void save_pseudo(const std::filesystem::path& path, const std::vector<PseudoSample>& pseudo) {
  write_text_file(path, dump_pseudo(pseudo));
}

std::vector<PseudoSample> load_pseudo(const std::filesystem::path& path) {
  return parse_pseudo(read_text_file(path), path.string());
}

}  // namespace acro
