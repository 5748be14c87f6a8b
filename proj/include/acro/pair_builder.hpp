#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "acro/core_types.hpp"
#include "acro/data_ingest.hpp"

namespace acro {

using TokenId = std::int32_t;

struct SpecialTokens {
  static constexpr std::string_view kPad = "[PAD]";
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::string_view kCls = "[CLS]";
  static constexpr std::string_view kSep = "[SEP]";
  static constexpr std::string_view kMask = "[MASK]";
  static constexpr std::string_view kAcronymStart = "<start>";
  static constexpr std::string_view kAcronymEnd = "<end>";
};

// Whole-token vocabulary. Special tokens occupy ids 0..6 in the order
// pad, unk, cls, sep, mask, acronym-start, acronym-end.
class Tokenizer {
 public:
  static constexpr TokenId kPadId = 0;
  static constexpr TokenId kUnkId = 1;
  static constexpr TokenId kClsId = 2;
  static constexpr TokenId kSepId = 3;
  static constexpr TokenId kMaskId = 4;
  static constexpr TokenId kAcronymStartId = 5;
  static constexpr TokenId kAcronymEndId = 6;
  static constexpr TokenId kNumSpecial = 7;

  Tokenizer();
  // `tokens` are the ordinary (non-special) vocabulary in id order.
  explicit Tokenizer(const std::vector<std::string>& tokens);

  std::size_t size() const noexcept { return id_to_token_.size(); }
  TokenId encode(std::string_view token) const;
  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;
  const std::string& decode(TokenId id) const;
  std::vector<std::string> decode(const std::vector<TokenId>& ids) const;
  bool contains(std::string_view token) const;
  static constexpr bool is_special(TokenId id) noexcept { return id >= 0 && id < kNumSpecial; }

  Json to_json() const;
  static Tokenizer from_json(const Json& j);
  void save(const std::filesystem::path& path) const;
  static Tokenizer load(const std::filesystem::path& path);

  friend bool operator==(const Tokenizer& a, const Tokenizer& b) { return a.id_to_token_ == b.id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

// Counts sample tokens and dictionary expansion words; keeps tokens seen at
// least `min_count` times, ordered by frequency then lexicographically.
Tokenizer build_vocab(const std::vector<Sample>& samples, const ExpansionDictionary& dict, int min_count);

std::vector<std::string> split_whitespace(std::string_view text);

inline constexpr std::size_t kDefaultMaxSeqLen = 128;

// Token-level layout of one (expansion, sentence) pair:
//   [CLS] expansion [SEP] prefix <start> acronym <end> suffix [SEP]
// Over-long inputs lose the sentence tokens farthest from the acronym first
// (ties drop the right-hand token), then trailing expansion words.
PairInstance layout_pair(std::string_view expansion, const Sample& sample,
                         std::size_t max_len = kDefaultMaxSeqLen);

struct FormattedInput {
  std::vector<TokenId> token_ids;
  std::vector<std::uint8_t> segment_ids;
  AcronymSpan acronym_span;
  std::size_t cls_position = 0;
};

FormattedInput encode_pair(const PairInstance& pair, const Tokenizer& tok);
FormattedInput format_input(std::string_view expansion, const Sample& sample, const Tokenizer& tok,
                            std::size_t max_len = kDefaultMaxSeqLen);

// One instance per dictionary candidate, in dictionary order.
std::vector<PairInstance> build_pairs(const Sample& sample, const ExpansionDictionary& dict,
                                      std::size_t max_len = kDefaultMaxSeqLen);
std::vector<PairInstance> build_all_pairs(const std::vector<Sample>& samples, const ExpansionDictionary& dict,
                                          std::size_t max_len = kDefaultMaxSeqLen);

}  // namespace acro
