#include "acro/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <type_traits>
#include <unordered_map>

#include "acro/config_fields.hpp"
#include "acro/errors.hpp"
#include "acro/rng.hpp"

namespace acro {

std::string read_text_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError(path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

namespace {

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte_offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte_offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string line_excerpt(std::string_view text, std::size_t line) {
  std::size_t current = 1, begin = 0;
  for (std::size_t i = 0; i < text.size() && current < line; ++i) {
    if (text[i] == '\n') {
      ++current;
      begin = i + 1;
    }
  }
  auto end = text.find('\n', begin);
  auto excerpt = std::string(text.substr(begin, end == std::string_view::npos ? text.npos : end - begin));
  if (excerpt.size() > 80) excerpt = excerpt.substr(0, 77) + "...";
  return excerpt;
}

}  // namespace

Json parse_json_text(std::string_view text, std::string_view source_name) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character.
    auto [line, col] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream msg;
    msg << source_name << ":" << line << ":" << col << ": malformed JSON (" << e.what() << ")\n    "
        << line_excerpt(text, line);
    throw ParseError(msg.str());
  }
}

Sample sample_from_json(const Json& record, std::size_t position) {
  const std::string where = "record " + std::to_string(position);
  if (!record.is_object()) throw ValidationError(where + ": expected an object");
  Sample s;
  auto id = record.find("id");
  if (id == record.end() || !id->is_string()) throw ValidationError(where + ": missing string field 'id'");
  s.id = id->get<std::string>();
  const std::string named = "sample '" + s.id + "'";
  auto toks = record.find("tokens");
  if (toks == record.end() || !toks->is_array()) throw ValidationError(named + ": missing array field 'tokens'");
  for (const auto& t : *toks) {
    if (!t.is_string()) throw ValidationError(named + ": non-string token");
    s.tokens.push_back(t.get<std::string>());
  }
  auto idx = record.find("acronym");
  if (idx == record.end() || !idx->is_number_integer()) {
    throw ValidationError(named + ": missing integer field 'acronym'");
  }
  const auto raw = idx->get<std::int64_t>();
  if (raw < 0) throw ValidationError(named + ": acronym index " + std::to_string(raw) + " out of range");
  s.acronym_index = static_cast<std::size_t>(raw);
  auto exp = record.find("expansion");
  if (exp != record.end() && !exp->is_null()) {
    if (!exp->is_string()) throw ValidationError(named + ": 'expansion' must be a string");
    s.gold_expansion = exp->get<std::string>();
  }
  return s;
}

Json sample_to_json(const Sample& sample) {
  Json j;
  j["id"] = sample.id;
  j["tokens"] = sample.tokens;
  j["acronym"] = sample.acronym_index;
  if (sample.gold_expansion) j["expansion"] = *sample.gold_expansion;
  return j;
}

namespace {

std::vector<Sample> parse_dataset_impl(std::string_view text, const ExpansionDictionary* dict,
                                       std::string_view source_name) {
  const Json doc = parse_json_text(text, source_name);
  if (!doc.is_array()) throw ValidationError(std::string(source_name) + ": dataset must be a JSON array");
  static const ExpansionDictionary kEmpty;
  std::vector<Sample> out;
  out.reserve(doc.size());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    Sample s = sample_from_json(doc[i], i);
    // Without a dictionary only the structural invariants are checked.
    Sample probe = s;
    if (!dict) probe.gold_expansion.reset();
    auto violations = validate_sample(probe, dict ? *dict : kEmpty);
    if (!violations.empty()) {
      std::string msg = std::string(source_name) + ": rejected sample '" + s.id + "':";
      for (const auto& v : violations) msg += "\n  " + v;
      throw ValidationError(msg);
    }
    if (!ids.insert(s.id).second) {
      throw ValidationError(std::string(source_name) + ": duplicate sample id '" + s.id + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<Sample> parse_dataset(std::string_view text, std::string_view source_name) {
  return parse_dataset_impl(text, nullptr, source_name);
}

std::vector<Sample> parse_dataset(std::string_view text, const ExpansionDictionary& dict,
                                  std::string_view source_name) {
  return parse_dataset_impl(text, &dict, source_name);
}

std::vector<Sample> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_text_file(path), path.string());
}

std::vector<Sample> load_dataset(const std::filesystem::path& path, const ExpansionDictionary& dict) {
  return parse_dataset(read_text_file(path), dict, path.string());
}

std::string dump_dataset(const std::vector<Sample>& samples) {
  Json arr = Json::array();
  for (const auto& s : samples) arr.push_back(sample_to_json(s));
  return arr.dump(1) + "\n";
}

void save_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  write_text_file(path, dump_dataset(samples));
}

ExpansionDictionary parse_dictionary(std::string_view text, std::string_view source_name) {
  const Json doc = parse_json_text(text, source_name);
  if (!doc.is_object()) throw ValidationError(std::string(source_name) + ": dictionary must be a JSON object");
  ExpansionDictionary dict;
  for (const auto& [acronym, list] : doc.items()) {
    if (!list.is_array()) {
      throw ValidationError(std::string(source_name) + ": expansions of '" + acronym + "' must be an array");
    }
    std::vector<std::string> expansions;
    for (const auto& e : list) {
      if (!e.is_string()) throw ValidationError(std::string(source_name) + ": non-string expansion for '" + acronym + "'");
      expansions.push_back(e.get<std::string>());
    }
    dict.add(acronym, std::move(expansions));
  }
  return dict;
}

ExpansionDictionary load_dictionary(const std::filesystem::path& path) {
  return parse_dictionary(read_text_file(path), path.string());
}

std::string dump_dictionary(const ExpansionDictionary& dict) {
  Json doc = Json::object();
  for (const auto& [acronym, expansions] : dict.entries()) doc[acronym] = expansions;
  return doc.dump(1) + "\n";
}

void save_dictionary(const std::filesystem::path& path, const ExpansionDictionary& dict) {
  write_text_file(path, dump_dictionary(dict));
}


Json train_config_to_json(const TrainConfig& cfg) {
  Json j = Json::object();
  for_each_config_field([&](const char* name, auto member) { j[name] = cfg.*member; });
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  TrainConfig cfg;
  std::set<std::string> known;
  for_each_config_field([&](const char* name, auto member) {
    known.insert(name);
    auto it = j.find(name);
    if (it == j.end()) return;
    using T = std::remove_reference_t<decltype(cfg.*member)>;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ValidationError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ValidationError("");
      } else {
        if (!it->is_number()) throw ValidationError("");
      }
      cfg.*member = it->template get<T>();
    } catch (const std::exception&) {
      throw ValidationError(std::string("config: field '") + name + "' has the wrong type");
    }
  });
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ValidationError("config: unknown field '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  return train_config_from_json(parse_json_text(read_text_file(path), path.string()));
}

CorpusStats compute_stats(const std::vector<Sample>& samples, const ExpansionDictionary& dict) {
  CorpusStats stats;
  stats.total_samples = samples.size();

  std::map<std::vector<std::string>, std::size_t> per_sentence;
  std::set<std::string> acronyms;
  for (const auto& s : samples) {
    ++per_sentence[s.tokens];
    acronyms.insert(s.acronym());
  }
  for (const auto& [tokens, count] : per_sentence) ++stats.acronyms_per_sentence[count];
  stats.distinct_sentences = per_sentence.size();
  stats.distinct_acronyms = acronyms.size();

  std::set<std::string> expansions;
  for (const auto& a : acronyms) {
    if (!dict.contains(a)) {
      ++stats.expansions_per_acronym[0];
      continue;
    }
    const auto& cands = dict.candidates(a);
    ++stats.expansions_per_acronym[cands.size()];
    for (const auto& e : cands) expansions.insert(normalize_expansion(e));
  }
  stats.distinct_expansions = expansions.size();
  return stats;
}

Json stats_to_json(const CorpusStats& stats) {
  auto hist = [](const std::map<std::size_t, std::size_t>& h) {
    Json j = Json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  Json j;
  j["total_samples"] = stats.total_samples;
  j["distinct_sentences"] = stats.distinct_sentences;
  j["distinct_acronyms"] = stats.distinct_acronyms;
  j["distinct_expansions"] = stats.distinct_expansions;
  j["acronyms_per_sentence"] = hist(stats.acronyms_per_sentence);
  j["expansions_per_acronym"] = hist(stats.expansions_per_acronym);
  return j;
}

std::string render_histogram_svg(const std::map<std::size_t, std::size_t>& histogram, std::string_view title,
                                 std::string_view x_label) {
  constexpr int kWidth = 480, kHeight = 320, kLeft = 56, kBottom = 48, kTop = 36, kRight = 16;
  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;
  std::size_t peak = 0;
  for (const auto& [k, v] : histogram) peak = std::max(peak, v);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  if (!histogram.empty() && peak > 0) {
    const double slot = static_cast<double>(plot_w) / static_cast<double>(histogram.size());
    std::size_t i = 0;
    svg << std::fixed << std::setprecision(1);
    for (const auto& [k, v] : histogram) {
      const double h = plot_h * static_cast<double>(v) / static_cast<double>(peak);
      const double x = kLeft + slot * static_cast<double>(i) + slot * 0.15;
      const double y = kTop + plot_h - h;
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << slot * 0.7 << "\" height=\"" << h
          << "\" fill=\"#4878a8\"/>\n";
      svg << "<text x=\"" << x + slot * 0.35 << "\" y=\"" << kTop + plot_h + 14
          << "\" text-anchor=\"middle\">" << k << "</text>\n";
      svg << "<text x=\"" << x + slot * 0.35 << "\" y=\"" << y - 3 << "\" text-anchor=\"middle\">" << v
          << "</text>\n";
      ++i;
    }
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
      << x_label << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

Split split(const std::vector<Sample>& samples, double dev_fraction, std::uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw ValidationError("split: dev_fraction must be in (0,1), got " + std::to_string(dev_fraction));
  }
  const auto target = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(samples.size())));

  std::unordered_map<std::string, std::size_t> group_size;
  for (const auto& s : samples) ++group_size[s.acronym()];
  auto in_train = group_size;

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x5117ULL));
  rng.shuffle(order);

  std::vector<bool> to_dev(samples.size(), false);
  std::size_t n_dev = 0;
  for (std::size_t i : order) {
    if (n_dev == target) break;
    const auto& acronym = samples[i].acronym();
    auto& remaining = in_train[acronym];
    if (group_size[acronym] >= 2 && remaining <= 1) continue;
    to_dev[i] = true;
    --remaining;
    ++n_dev;
  }

  Split out;
  for (std::size_t i = 0; i < samples.size(); ++i) (to_dev[i] ? out.dev : out.train).push_back(samples[i]);
  return out;
}

}  // namespace acro
