#include "acro/tapt_pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "acro/errors.hpp"
#include "acro/optimizer.hpp"
#include "acro/rng.hpp"

namespace acro {

MaskingPlan make_masking_plan(std::span<const TokenId> token_ids, const Tokenizer& tok, double mask_rate,
                              std::uint64_t seed) {
  std::vector<std::size_t> maskable;
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    if (!Tokenizer::is_special(token_ids[i])) maskable.push_back(i);
  }
  MaskingPlan plan;
  if (maskable.empty()) return plan;
  auto count = static_cast<std::size_t>(std::llround(mask_rate * static_cast<double>(maskable.size())));
  count = std::clamp<std::size_t>(count, 1, maskable.size());

  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(maskable[i], maskable[i + rng.uniform_index(maskable.size() - i)]);
  }
  maskable.resize(count);
  std::sort(maskable.begin(), maskable.end());

  const auto vocab = static_cast<TokenId>(tok.size());
  plan.positions = std::move(maskable);
  for (std::size_t pos : plan.positions) {
    const double u = rng.uniform01();
    if (u < 0.8 || vocab <= Tokenizer::kNumSpecial) {
      plan.actions.push_back(MaskAction::mask);
      plan.replacements.push_back(Tokenizer::kMaskId);
    } else if (u < 0.9) {
      plan.actions.push_back(MaskAction::random);
      const auto span = static_cast<std::size_t>(vocab - Tokenizer::kNumSpecial);
      plan.replacements.push_back(Tokenizer::kNumSpecial + static_cast<TokenId>(rng.uniform_index(span)));
    } else {
      plan.actions.push_back(MaskAction::keep);
      plan.replacements.push_back(token_ids[pos]);
    }
  }
  return plan;
}

std::vector<TokenId> apply_masking_plan(std::span<const TokenId> token_ids, const MaskingPlan& plan) {
  std::vector<TokenId> out(token_ids.begin(), token_ids.end());
  for (std::size_t i = 0; i < plan.positions.size(); ++i) out[plan.positions[i]] = plan.replacements[i];
  return out;
}

namespace {

// Shared forward (and optional backward) for one sequence.
double mlm_pass(const FormattedInput& input, const MaskingPlan& plan, const EncoderContract& encoder,
                const MlmHead& head, const DropoutContext* dropout, std::size_t* correct, EncoderContract* grad_encoder,
                MlmHead* grad_head, double grad_scale) {
  if (plan.empty()) return 0.0;
  const auto corrupted = apply_masking_plan(input.token_ids, plan);
  const Matrix emb = encoder.embed(corrupted);
  auto tape = grad_encoder ? encoder.make_tape() : nullptr;
  const Matrix ctx = encoder.encode(emb, input.segment_ids, dropout, tape.get());
  const Matrix& table = encoder.embedding_table().value;

  Matrix d_ctx;
  if (grad_encoder) d_ctx = Matrix::Zero(ctx.rows(), ctx.cols());
  double loss = 0.0;
  for (std::size_t k = 0; k < plan.positions.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(plan.positions[k]);
    const TokenId target = input.token_ids[plan.positions[k]];
    RowVector logits = ctx.row(row) * table.transpose() + head.bias.value.row(0);
    Eigen::Index best = 0;
    const double mx = logits.maxCoeff(&best);
    if (correct && best == target) ++*correct;
    RowVector probs = (logits.array() - mx).exp();
    const double z = probs.sum();
    probs /= z;
    loss += -(logits(target) - mx - std::log(z));
    if (grad_encoder) {
      RowVector d_logits = probs;
      d_logits(target) -= 1.0;
      d_logits *= grad_scale;
      d_ctx.row(row) += d_logits * table;
      grad_encoder->embedding_table().grad.noalias() += d_logits.transpose() * ctx.row(row);
      grad_head->bias.grad.row(0) += d_logits;
    }
  }
  if (grad_encoder) {
    const Matrix d_emb = grad_encoder->encode_backward(*tape, d_ctx);
    grad_encoder->embed_backward(corrupted, d_emb);
  }
  return loss;
}

}  // namespace

double mlm_sequence_loss(const FormattedInput& input, const MaskingPlan& plan, EncoderContract& encoder,
                         MlmHead& head, const DropoutContext* dropout, double grad_scale, bool backward,
                         std::size_t* correct) {
  return mlm_pass(input, plan, encoder, head, dropout, correct, backward ? &encoder : nullptr,
                  backward ? &head : nullptr, grad_scale);
}

TaptResult tapt_train_sequences(const std::vector<FormattedInput>& corpus, EncoderContract& encoder,
                                const Tokenizer& tok, int epochs, const TrainConfig& cfg) {
  if (encoder.vocab_size() != tok.size()) throw ValidationError("tapt: encoder vocabulary does not match tokenizer");
  TaptResult result;
  result.mlm_head = MlmHead(encoder.vocab_size());
  if (epochs <= 0 || corpus.empty()) return result;

  AdamOptimizer optimizer(cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  auto params = encoder.parameters();
  params.push_back(&result.mlm_head.bias);
  const auto bs = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(cfg.seed, 0x7A97ULL, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t position_count = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += bs) {
      const std::size_t end = std::min(begin + bs, order.size());
      std::vector<MaskingPlan> plans;
      std::size_t batch_positions = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto seed = derive_seed(cfg.seed, 0x3A5CULL, static_cast<std::uint64_t>(epoch), order[i]);
        plans.push_back(make_masking_plan(corpus[order[i]].token_ids, tok, cfg.mask_rate, seed));
        batch_positions += plans.back().positions.size();
      }
      if (batch_positions == 0) continue;
      for (auto* p : params) p->zero_grad();
      const double scale = 1.0 / static_cast<double>(batch_positions);
      double batch_loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const DropoutContext drop{cfg.dropout_rate, derive_seed(cfg.seed, 0xD50FULL, static_cast<std::uint64_t>(epoch), order[i])};
        batch_loss += mlm_sequence_loss(corpus[order[i]], plans[i - begin], encoder, result.mlm_head, &drop, scale,
                                        /*backward=*/true);
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "TAPT diverged: non-finite masked-LM loss at epoch " << epoch;
        throw DivergenceError(msg.str());
      }
      optimizer.step(params, cfg.tapt_lr, cfg.tapt_lr);
      loss_sum += batch_loss;
      position_count += batch_positions;
    }
    result.epoch_loss.push_back(position_count ? loss_sum / static_cast<double>(position_count) : 0.0);
  }
  return result;
}

std::vector<FormattedInput> tapt_corpus(const std::vector<Sample>& samples, const ExpansionDictionary& dict,
                                        const Tokenizer& tok, std::size_t max_len) {
  std::vector<FormattedInput> corpus;
  for (const auto& s : samples) {
    if (!dict.contains(s.acronym())) continue;
    for (const auto& p : build_pairs(s, dict, max_len)) corpus.push_back(encode_pair(p, tok));
  }
  return corpus;
}

TaptResult tapt_train(const std::vector<Sample>& samples, const ExpansionDictionary& dict, EncoderContract& encoder,
                      const Tokenizer& tok, int epochs, const TrainConfig& cfg) {
  cfg.validate();
  return tapt_train_sequences(tapt_corpus(samples, dict, tok, static_cast<std::size_t>(cfg.max_seq_len)), encoder,
                              tok, epochs, cfg);
}

MlmEvaluation evaluate_mlm(const std::vector<FormattedInput>& corpus, const EncoderContract& encoder,
                           const MlmHead& head, const Tokenizer& tok, double mask_rate, std::uint64_t seed) {
  MlmEvaluation ev;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto plan = make_masking_plan(corpus[i].token_ids, tok, mask_rate, derive_seed(seed, i));
    ev.loss += mlm_pass(corpus[i], plan, encoder, head, nullptr, &correct, nullptr, nullptr, 0.0);
    ev.positions += plan.positions.size();
  }
  if (ev.positions) {
    ev.loss /= static_cast<double>(ev.positions);
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.positions);
  }
  return ev;
}

}  // namespace acro
