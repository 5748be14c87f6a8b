#include "acro/pair_builder.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "acro/errors.hpp"

namespace acro {

namespace {

const std::vector<std::string>& special_table() {
  static const std::vector<std::string> table = {
      std::string(SpecialTokens::kPad),          std::string(SpecialTokens::kUnk),
      std::string(SpecialTokens::kCls),          std::string(SpecialTokens::kSep),
      std::string(SpecialTokens::kMask),         std::string(SpecialTokens::kAcronymStart),
      std::string(SpecialTokens::kAcronymEnd)};
  return table;
}

bool is_special_string(std::string_view token) {
  const auto& t = special_table();
  return std::find(t.begin(), t.end(), token) != t.end();
}

}  // namespace

Tokenizer::Tokenizer() : Tokenizer(std::vector<std::string>{}) {}

Tokenizer::Tokenizer(const std::vector<std::string>& tokens) {
  id_to_token_ = special_table();
  id_to_token_.insert(id_to_token_.end(), tokens.begin(), tokens.end());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    if (id_to_token_[i].empty()) throw ValidationError("tokenizer: empty token");
    if (!token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i)).second) {
      throw ValidationError("tokenizer: duplicate token '" + id_to_token_[i] + "'");
    }
  }
}

TokenId Tokenizer::encode(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

std::vector<TokenId> Tokenizer::encode(const std::vector<std::string>& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(encode(t));
  return ids;
}

const std::string& Tokenizer::decode(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw std::out_of_range("tokenizer: id " + std::to_string(id) + " outside vocabulary");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<std::string> Tokenizer::decode(const std::vector<TokenId>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(decode(id));
  return out;
}

bool Tokenizer::contains(std::string_view token) const { return token_to_id_.contains(std::string(token)); }

Json Tokenizer::to_json() const {
  Json j;
  Json special = Json::object();
  special["pad"] = SpecialTokens::kPad;
  special["unk"] = SpecialTokens::kUnk;
  special["cls"] = SpecialTokens::kCls;
  special["sep"] = SpecialTokens::kSep;
  special["mask"] = SpecialTokens::kMask;
  special["acronym_start"] = SpecialTokens::kAcronymStart;
  special["acronym_end"] = SpecialTokens::kAcronymEnd;
  j["special"] = special;
  Json vocab = Json::object();
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) vocab[id_to_token_[i]] = i;
  j["vocab"] = vocab;
  return j;
}

Tokenizer Tokenizer::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vocab") || !j["vocab"].is_object()) {
    throw ValidationError("tokenizer: expected object with 'vocab'");
  }
  const auto& vocab = j["vocab"];
  std::vector<std::string> by_id(vocab.size());
  for (const auto& [token, id] : vocab.items()) {
    if (!id.is_number_integer()) throw ValidationError("tokenizer: non-integer id for '" + token + "'");
    const auto i = id.get<std::int64_t>();
    if (i < 0 || static_cast<std::size_t>(i) >= by_id.size() || !by_id[static_cast<std::size_t>(i)].empty()) {
      throw ValidationError("tokenizer: ids must be a permutation of 0..n-1");
    }
    by_id[static_cast<std::size_t>(i)] = token;
  }
  const auto& specials = special_table();
  if (by_id.size() < specials.size() ||
      !std::equal(specials.begin(), specials.end(), by_id.begin())) {
    throw ValidationError("tokenizer: special token table mismatch");
  }
  return Tokenizer(std::vector<std::string>(by_id.begin() + kNumSpecial, by_id.end()));
}

void Tokenizer::save(const std::filesystem::path& path) const { write_text_file(path, to_json().dump(1) + "\n"); }

Tokenizer Tokenizer::load(const std::filesystem::path& path) {
  return from_json(parse_json_text(read_text_file(path), path.string()));
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

Tokenizer build_vocab(const std::vector<Sample>& samples, const ExpansionDictionary& dict, int min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : samples) {
    for (const auto& t : s.tokens) ++counts[t];
  }
  for (const auto& [acronym, expansions] : dict.entries()) {
    for (const auto& e : expansions) {
      for (auto& w : split_whitespace(e)) ++counts[w];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= static_cast<std::size_t>(std::max(min_count, 1)) && !is_special_string(token)) {
      kept.emplace_back(token, count);
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [t, c] : kept) tokens.push_back(std::move(t));
  return Tokenizer(tokens);
}

PairInstance layout_pair(std::string_view expansion, const Sample& sample, std::size_t max_len) {
  auto expansion_words = split_whitespace(expansion);
  if (expansion_words.empty()) throw ValidationError("format_input: empty expansion");
  if (sample.acronym_index >= sample.tokens.size()) {
    throw ValidationError("format_input: acronym index out of range for sample '" + sample.id + "'");
  }
  // [CLS] [SEP] <start> acronym <end> [SEP] plus at least one expansion word.
  constexpr std::size_t kFixed = 6;
  if (max_len < kFixed + 1) throw ValidationError("format_input: max_len too small");

  std::size_t left = sample.acronym_index;
  std::size_t right = sample.tokens.size() - 1 - sample.acronym_index;
  std::size_t total = kFixed + expansion_words.size() + left + right;
  while (total > max_len && left + right > 0) {
    // Distance of the outermost kept token on each side equals its count.
    if (right >= left) {
      --right;
    } else {
      --left;
    }
    --total;
  }
  while (total > max_len && expansion_words.size() > 1) {
    expansion_words.pop_back();
    --total;
  }

  PairInstance p;
  p.sample_id = sample.id;
  p.expansion = std::string(expansion);
  auto& out = p.input_tokens;
  out.reserve(total);
  out.emplace_back(SpecialTokens::kCls);
  out.insert(out.end(), expansion_words.begin(), expansion_words.end());
  out.emplace_back(SpecialTokens::kSep);
  p.segment0_length = out.size();
  const std::size_t a = sample.acronym_index;
  out.insert(out.end(), sample.tokens.begin() + static_cast<std::ptrdiff_t>(a - left),
             sample.tokens.begin() + static_cast<std::ptrdiff_t>(a));
  p.acronym_span.start = out.size();
  out.emplace_back(SpecialTokens::kAcronymStart);
  out.push_back(sample.tokens[a]);
  p.acronym_span.end = out.size();
  out.emplace_back(SpecialTokens::kAcronymEnd);
  out.insert(out.end(), sample.tokens.begin() + static_cast<std::ptrdiff_t>(a + 1),
             sample.tokens.begin() + static_cast<std::ptrdiff_t>(a + 1 + right));
  out.emplace_back(SpecialTokens::kSep);
  return p;
}

FormattedInput encode_pair(const PairInstance& pair, const Tokenizer& tok) {
  FormattedInput f;
  f.token_ids.reserve(pair.input_tokens.size());
  for (std::size_t i = 0; i < pair.input_tokens.size(); ++i) {
    const auto& t = pair.input_tokens[i];
    // Markers are only special at their structural positions; the same
    // strings inside sentence text are ordinary (unknown) tokens.
    if (i == 0) {
      f.token_ids.push_back(Tokenizer::kClsId);
    } else if (i == pair.segment0_length - 1 || i + 1 == pair.input_tokens.size()) {
      f.token_ids.push_back(Tokenizer::kSepId);
    } else if (i == pair.acronym_span.start) {
      f.token_ids.push_back(Tokenizer::kAcronymStartId);
    } else if (i == pair.acronym_span.end) {
      f.token_ids.push_back(Tokenizer::kAcronymEndId);
    } else {
      const auto id = tok.encode(t);
      f.token_ids.push_back(Tokenizer::is_special(id) ? Tokenizer::kUnkId : id);
    }
  }
  f.segment_ids.assign(pair.input_tokens.size(), 1);
  std::fill_n(f.segment_ids.begin(), pair.segment0_length, std::uint8_t{0});
  f.acronym_span = pair.acronym_span;
  f.cls_position = 0;
  return f;
}

FormattedInput format_input(std::string_view expansion, const Sample& sample, const Tokenizer& tok,
                            std::size_t max_len) {
  return encode_pair(layout_pair(expansion, sample, max_len), tok);
}

std::vector<PairInstance> build_pairs(const Sample& sample, const ExpansionDictionary& dict, std::size_t max_len) {
  const auto& candidates = dict.candidates(sample.acronym());
  std::optional<std::size_t> gold;
  if (sample.gold_expansion) {
    gold = dict.index_of(sample.acronym(), *sample.gold_expansion);
    if (!gold) {
      throw ValidationError("sample '" + sample.id + "': gold expansion '" + *sample.gold_expansion +
                            "' is not a candidate of '" + sample.acronym() + "'");
    }
  }
  std::vector<PairInstance> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto p = layout_pair(candidates[i], sample, max_len);
    if (gold) p.label = static_cast<std::uint8_t>(i == *gold ? 1 : 0);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairInstance> build_all_pairs(const std::vector<Sample>& samples, const ExpansionDictionary& dict,
                                          std::size_t max_len) {
  std::vector<PairInstance> out;
  for (const auto& s : samples) {
    auto pairs = build_pairs(s, dict, max_len);
    std::move(pairs.begin(), pairs.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace acro
