#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acro/core_types.hpp"
#include "acro/model.hpp"
#include "acro/pair_builder.hpp"

namespace acro {

enum class MaskAction : std::uint8_t { mask, random, keep };

struct MaskingPlan {
  std::vector<std::size_t> positions;  // ascending
  std::vector<MaskAction> actions;
  // Token placed at each position (the [MASK] id, a random id, or the original).
  std::vector<TokenId> replacements;

  bool empty() const noexcept { return positions.empty(); }
};

// round(mask_rate * maskable) positions (at least one when any token is
// maskable), drawn uniformly without replacement among non-special tokens;
// actions 80% mask / 10% random / 10% keep.
MaskingPlan make_masking_plan(std::span<const TokenId> token_ids, const Tokenizer& tok, double mask_rate,
                              std::uint64_t seed);
std::vector<TokenId> apply_masking_plan(std::span<const TokenId> token_ids, const MaskingPlan& plan);

// Output bias of the masked-LM projection; the weights are the token
// embedding table.
struct MlmHead {
  Parameter bias;
  MlmHead() = default;
  explicit MlmHead(std::size_t vocab_size) : bias("mlm.bias", ParamGroup::head, 1, static_cast<Eigen::Index>(vocab_size)) {}
};

struct TaptResult {
  std::vector<double> epoch_loss;
  MlmHead mlm_head;
};

// Masked-LM training of `encoder` on the given token sequences. Masks are
// redrawn every epoch. Throws DivergenceError on a non-finite loss.
TaptResult tapt_train_sequences(const std::vector<FormattedInput>& corpus, EncoderContract& encoder,
                                const Tokenizer& tok, int epochs, const TrainConfig& cfg);

// Corpus = every (candidate, sentence) pair of `samples`, labels ignored.
std::vector<FormattedInput> tapt_corpus(const std::vector<Sample>& samples, const ExpansionDictionary& dict,
                                        const Tokenizer& tok, std::size_t max_len = kDefaultMaxSeqLen);
TaptResult tapt_train(const std::vector<Sample>& samples, const ExpansionDictionary& dict, EncoderContract& encoder,
                      const Tokenizer& tok, int epochs, const TrainConfig& cfg);

struct MlmEvaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::size_t positions = 0;
};

// Loss and top-1 accuracy at masked positions, dropout off, fixed seed.
MlmEvaluation evaluate_mlm(const std::vector<FormattedInput>& corpus, const EncoderContract& encoder,
                           const MlmHead& head, const Tokenizer& tok, double mask_rate, std::uint64_t seed);

// Cross-entropy at plan positions for one sequence; optionally accumulates
// gradients scaled by `grad_scale` into encoder and head.
double mlm_sequence_loss(const FormattedInput& input, const MaskingPlan& plan, EncoderContract& encoder,
                         MlmHead& head, const DropoutContext* dropout, double grad_scale, bool backward,
                         std::size_t* correct = nullptr);

}  // namespace acro
