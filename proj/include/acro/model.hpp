#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "acro/data_ingest.hpp"
#include "acro/pair_builder.hpp"
#include "acro/tensor.hpp"

namespace acro {

// Per-forward cache an encoder needs for its backward pass.
struct EncoderTape {
  virtual ~EncoderTape() = default;
};

// What the scorer needs from a contextual encoder. Any encoder that can embed
// token ids, contextualize them, and backpropagate can be plugged in.
class EncoderContract {
 public:
  virtual ~EncoderContract() = default;

  virtual std::size_t hidden_dim() const = 0;
  virtual std::size_t vocab_size() const = 0;
  virtual std::size_t max_positions() const = 0;

  // Rows of the token embedding table for `ids`. Throws std::out_of_range
  // for ids outside the table.
  virtual Matrix embed(std::span<const TokenId> ids) const = 0;
  virtual void embed_backward(std::span<const TokenId> ids, const Matrix& d_embeddings) = 0;

  // One d-vector per input position. `dropout` may be null (inference);
  // `tape` may be null when no backward pass follows.
  virtual Matrix encode(const Matrix& embeddings, std::span<const std::uint8_t> segment_ids,
                        const DropoutContext* dropout, EncoderTape* tape) const = 0;
  // Accumulates parameter gradients; returns the gradient w.r.t. embeddings.
  virtual Matrix encode_backward(const EncoderTape& tape, const Matrix& d_contextual) = 0;
  virtual std::unique_ptr<EncoderTape> make_tape() const = 0;

  virtual Parameter& embedding_table() = 0;
  virtual const Parameter& embedding_table() const = 0;
  virtual std::vector<Parameter*> parameters() = 0;
  virtual std::vector<const Parameter*> parameters() const = 0;

  virtual std::unique_ptr<EncoderContract> clone() const = 0;
  // Architecture description stored in checkpoints.
  virtual Json describe() const = 0;
};

struct DeskEncoderConfig {
  int layers = 2;
  int hidden_dim = 128;
  int attention_heads = 4;
  int feedforward_dim = 256;
  int max_positions = 128;

  void validate() const;
  Json to_json() const;
  static DeskEncoderConfig from_json(const Json& j);
  friend bool operator==(const DeskEncoderConfig&, const DeskEncoderConfig&) = default;
};

// Small post-norm transformer stack with learned token, position and segment
// embeddings and GELU feedforward blocks.
class DeskEncoder final : public EncoderContract {
 public:
  DeskEncoder(const DeskEncoderConfig& cfg, std::size_t vocab_size, std::uint64_t seed);

  const DeskEncoderConfig& config() const noexcept { return cfg_; }

  std::size_t hidden_dim() const override { return static_cast<std::size_t>(cfg_.hidden_dim); }
  std::size_t vocab_size() const override { return static_cast<std::size_t>(token_.value.rows()); }
  std::size_t max_positions() const override { return static_cast<std::size_t>(cfg_.max_positions); }

  Matrix embed(std::span<const TokenId> ids) const override;
  void embed_backward(std::span<const TokenId> ids, const Matrix& d_embeddings) override;
  Matrix encode(const Matrix& embeddings, std::span<const std::uint8_t> segment_ids,
                const DropoutContext* dropout, EncoderTape* tape) const override;
  Matrix encode_backward(const EncoderTape& tape, const Matrix& d_contextual) override;
  std::unique_ptr<EncoderTape> make_tape() const override;

  Parameter& embedding_table() override { return token_; }
  const Parameter& embedding_table() const override { return token_; }
  std::vector<Parameter*> parameters() override;
  std::vector<const Parameter*> parameters() const override;

  std::unique_ptr<EncoderContract> clone() const override { return std::make_unique<DeskEncoder>(*this); }
  Json describe() const override;

 private:
  struct Layer {
    Parameter wq, bq, wk, bk, wv, bv, wo, bo;
    Parameter ln1_gamma, ln1_beta;
    Parameter w1, b1, w2, b2;
    Parameter ln2_gamma, ln2_beta;
  };

  DeskEncoderConfig cfg_;
  Parameter token_, position_, segment_;
  Parameter ln0_gamma_, ln0_beta_;
  std::vector<Layer> layers_;
};

struct BinaryHead {
  double dropout_rate = 0.1;
  Parameter w1;  // 2d x h
  Parameter b1;  // 1 x h
  Parameter w2;  // h x 1
  Parameter b2;  // 1 x 1

  BinaryHead() = default;
  BinaryHead(std::size_t rep_dim, std::size_t hidden, double dropout, std::uint64_t seed);

  std::vector<Parameter*> parameters() { return {&w1, &b1, &w2, &b2}; }
  std::vector<const Parameter*> parameters() const { return {&w1, &b1, &w2, &b2}; }
};

struct HeadTape {
  RowVector input;  // after first dropout
  RowVector mask1, mask2;
  RowVector pre_activation;
  RowVector hidden;  // after relu and second dropout
  double logit = 0.0;
  double score = 0.0;
};

// concat(row[cls], (row[start] + row[end]) / 2)
RowVector extract_representation(const Matrix& contextual, std::size_t cls_position, AcronymSpan span);
// Scatters a representation gradient back onto the contextual rows it read.
void extract_representation_backward(const RowVector& d_rep, std::size_t cls_position, AcronymSpan span,
                                     Matrix& d_contextual);

// sigmoid(layer2(dropout(relu(layer1(dropout(rep)))))); dropout only when
// `dropout` is non-null and active. Throws std::domain_error on non-finite input.
double head_forward(const RowVector& rep, const BinaryHead& head, const DropoutContext* dropout = nullptr,
                    HeadTape* tape = nullptr);
// Accumulates head gradients for d(loss)/d(logit); returns d(loss)/d(rep).
RowVector head_backward(const HeadTape& tape, BinaryHead& head, double d_logit);

double sigmoid(double x);

// Encoder plus binary head; scores one formatted pair.
class ScoringModel {
 public:
  ScoringModel() = default;
  ScoringModel(std::unique_ptr<EncoderContract> encoder, BinaryHead head);
  ScoringModel(const ScoringModel& other);
  ScoringModel& operator=(const ScoringModel& other);
  ScoringModel(ScoringModel&&) noexcept = default;
  ScoringModel& operator=(ScoringModel&&) noexcept = default;

  EncoderContract& encoder() { return *encoder_; }
  const EncoderContract& encoder() const { return *encoder_; }
  BinaryHead& head() { return head_; }
  const BinaryHead& head() const { return head_; }

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  void zero_grad();

  struct Trace {
    std::unique_ptr<EncoderTape> encoder_tape;
    Matrix contextual;
    HeadTape head;
  };

  // Inference when `dropout` is null.
  double score(const FormattedInput& input, const DropoutContext* dropout = nullptr) const;
  // Forward pass retaining everything backward() needs.
  double forward(const FormattedInput& input, const DropoutContext* dropout, Trace& trace) const;
  void backward(const FormattedInput& input, const Trace& trace, double d_logit);

 private:
  std::unique_ptr<EncoderContract> encoder_;
  BinaryHead head_;
};

ScoringModel make_desk_model(const DeskEncoderConfig& cfg, std::size_t vocab_size, double dropout_rate,
                             std::uint64_t seed);

// Score of one pair instance in eval or training mode.
double score_pair(const PairInstance& instance, const Tokenizer& tok, const ScoringModel& model,
                  const DropoutContext* dropout = nullptr);

// Snapshot of all parameter values, in parameters() order.
std::vector<Matrix> snapshot_parameters(const ScoringModel& model);
void restore_parameters(ScoringModel& model, const std::vector<Matrix>& values);

}  // namespace acro
