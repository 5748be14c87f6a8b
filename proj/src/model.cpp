#include "acro/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "acro/errors.hpp"

namespace acro {

namespace {

constexpr double kInitStd = 0.02;

// Weight matrices use 1/sqrt(fan_in) so that small hidden sizes keep
// unit-scale activations; embeddings and the output layer keep 0.02.
double fan_in_std(const Parameter& w) { return 1.0 / std::sqrt(static_cast<double>(w.value.rows())); }
constexpr double kLayerNormEps = 1e-12;

// Dropout sites; head sites sit above any realistic layer count.
constexpr std::uint64_t kSiteEmbedding = 1;
constexpr std::uint64_t kSiteHeadInput = 1u << 20;
constexpr std::uint64_t kSiteHeadHidden = (1u << 20) + 1;
constexpr std::uint64_t site_attention(std::size_t layer) { return 2 + 2 * layer; }
constexpr std::uint64_t site_ffn(std::size_t layer) { return 3 + 2 * layer; }

struct LayerNormCache {
  Matrix xhat;
  Eigen::VectorXd inv_std;
};

Matrix layer_norm(const Matrix& x, const Parameter& gamma, const Parameter& beta, LayerNormCache* cache) {
  const Eigen::Index n = x.rows(), d = x.cols();
  Matrix xhat(n, d);
  Eigen::VectorXd inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().mean();
    inv(i) = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(i) = (x.row(i).array() - mean) * inv(i);
  }
  Matrix y = (xhat.array().rowwise() * gamma.value.row(0).array()).rowwise() + beta.value.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv);
  }
  return y;
}

Matrix layer_norm_backward(const LayerNormCache& cache, const Matrix& dy, Parameter& gamma, Parameter& beta) {
  gamma.grad.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  beta.grad.row(0) += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * gamma.value.row(0).array();
  const double d = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double mean_d = dxhat.row(i).sum() / d;
    const double mean_dx = dxhat.row(i).dot(cache.xhat.row(i)) / d;
    dx.row(i) = cache.inv_std(i) * (dxhat.row(i).array() - mean_d - cache.xhat.row(i).array() * mean_dx);
  }
  return dx;
}

// tanh approximation of GELU.
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

double gelu(double x) { return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x))); }

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

Matrix affine(const Matrix& x, const Parameter& w, const Parameter& b) {
  Matrix y = x * w.value;
  y.rowwise() += b.value.row(0);
  return y;
}

// Returns dx; accumulates dw and db.
Matrix affine_backward(const Matrix& x, const Matrix& dy, Parameter& w, Parameter& b) {
  w.grad.noalias() += x.transpose() * dy;
  b.grad.row(0) += dy.colwise().sum();
  return dy * w.value.transpose();
}

}  // namespace

// --- DeskEncoder ---------------------------------------------------------

void DeskEncoderConfig::validate() const {
  if (layers < 0 || hidden_dim <= 0 || attention_heads <= 0 || feedforward_dim <= 0 || max_positions <= 0) {
    throw ValidationError("encoder config: sizes must be positive");
  }
  if (hidden_dim % attention_heads != 0) {
    throw ValidationError("encoder config: hidden_dim must be divisible by attention_heads");
  }
}

Json DeskEncoderConfig::to_json() const {
  Json j;
  j["layers"] = layers;
  j["hidden_dim"] = hidden_dim;
  j["attention_heads"] = attention_heads;
  j["feedforward_dim"] = feedforward_dim;
  j["max_positions"] = max_positions;
  return j;
}

DeskEncoderConfig DeskEncoderConfig::from_json(const Json& j) {
  DeskEncoderConfig c;
  c.layers = j.value("layers", c.layers);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.attention_heads = j.value("attention_heads", c.attention_heads);
  c.feedforward_dim = j.value("feedforward_dim", c.feedforward_dim);
  c.max_positions = j.value("max_positions", c.max_positions);
  c.validate();
  return c;
}

namespace {

struct LayerTape {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> probs;
  Matrix attn;  // concatenated heads, before output projection
  Matrix attn_mask;
  LayerNormCache ln1;
  Matrix h1;
  Matrix f1;  // pre-GELU
  Matrix g;   // post-GELU
  Matrix ffn_mask;
  LayerNormCache ln2;
};

struct DeskEncoderTape final : EncoderTape {
  std::vector<std::uint8_t> segments;
  LayerNormCache ln0;
  Matrix emb_mask;
  std::vector<LayerTape> layers;
};

}  // namespace

DeskEncoder::DeskEncoder(const DeskEncoderConfig& cfg, std::size_t vocab_size, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  if (vocab_size == 0) throw ValidationError("encoder: empty vocabulary");
  const auto d = static_cast<Eigen::Index>(cfg_.hidden_dim);
  const auto ff = static_cast<Eigen::Index>(cfg_.feedforward_dim);
  Rng rng(derive_seed(seed, 0xE1C0DEULL));
  auto enc = ParamGroup::encoder;

  token_ = Parameter("encoder.token_embedding", enc, static_cast<Eigen::Index>(vocab_size), d);
  position_ = Parameter("encoder.position_embedding", enc, cfg_.max_positions, d);
  segment_ = Parameter("encoder.segment_embedding", enc, 2, d);
  token_.init_normal(rng, kInitStd);
  position_.init_normal(rng, kInitStd);
  segment_.init_normal(rng, kInitStd);
  ln0_gamma_ = Parameter("encoder.embedding_norm.gamma", enc, 1, d);
  ln0_beta_ = Parameter("encoder.embedding_norm.beta", enc, 1, d);
  ln0_gamma_.value.setOnes();

  layers_.resize(static_cast<std::size_t>(cfg_.layers));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& L = layers_[l];
    const std::string p = "encoder.layer" + std::to_string(l) + ".";
    L.wq = Parameter(p + "attention.wq", enc, d, d);
    L.bq = Parameter(p + "attention.bq", enc, 1, d);
    L.wk = Parameter(p + "attention.wk", enc, d, d);
    L.bk = Parameter(p + "attention.bk", enc, 1, d);
    L.wv = Parameter(p + "attention.wv", enc, d, d);
    L.bv = Parameter(p + "attention.bv", enc, 1, d);
    L.wo = Parameter(p + "attention.wo", enc, d, d);
    L.bo = Parameter(p + "attention.bo", enc, 1, d);
    L.ln1_gamma = Parameter(p + "attention_norm.gamma", enc, 1, d);
    L.ln1_beta = Parameter(p + "attention_norm.beta", enc, 1, d);
    L.w1 = Parameter(p + "ffn.w1", enc, d, ff);
    L.b1 = Parameter(p + "ffn.b1", enc, 1, ff);
    L.w2 = Parameter(p + "ffn.w2", enc, ff, d);
    L.b2 = Parameter(p + "ffn.b2", enc, 1, d);
    L.ln2_gamma = Parameter(p + "ffn_norm.gamma", enc, 1, d);
    L.ln2_beta = Parameter(p + "ffn_norm.beta", enc, 1, d);
    for (auto* w : {&L.wq, &L.wk, &L.wv, &L.wo, &L.w1, &L.w2}) w->init_normal(rng, fan_in_std(*w));
    L.ln1_gamma.value.setOnes();
    L.ln2_gamma.value.setOnes();
  }
}

Matrix DeskEncoder::embed(std::span<const TokenId> ids) const {
  Matrix out(static_cast<Eigen::Index>(ids.size()), token_.value.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= token_.value.rows()) {
      throw std::out_of_range("encoder: token id " + std::to_string(ids[i]) + " outside embedding table of " +
                              std::to_string(token_.value.rows()));
    }
    out.row(static_cast<Eigen::Index>(i)) = token_.value.row(ids[i]);
  }
  return out;
}

void DeskEncoder::embed_backward(std::span<const TokenId> ids, const Matrix& d_embeddings) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    token_.grad.row(ids[i]) += d_embeddings.row(static_cast<Eigen::Index>(i));
  }
}

std::unique_ptr<EncoderTape> DeskEncoder::make_tape() const { return std::make_unique<DeskEncoderTape>(); }

Matrix DeskEncoder::encode(const Matrix& embeddings, std::span<const std::uint8_t> segment_ids,
                           const DropoutContext* dropout, EncoderTape* tape_base) const {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = cfg_.hidden_dim;
  if (embeddings.cols() != d) throw std::invalid_argument("encoder: embedding width mismatch");
  if (static_cast<std::size_t>(n) != segment_ids.size()) throw std::invalid_argument("encoder: segment length mismatch");
  if (n > cfg_.max_positions) {
    throw std::out_of_range("encoder: sequence of " + std::to_string(n) + " exceeds max_positions " +
                            std::to_string(cfg_.max_positions));
  }
  auto* tape = static_cast<DeskEncoderTape*>(tape_base);
  const bool drop = dropout && dropout->active();

  Matrix x = embeddings + position_.value.topRows(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto s = segment_ids[static_cast<std::size_t>(i)];
    if (s > 1) throw std::invalid_argument("encoder: segment id must be 0 or 1");
    x.row(i) += segment_.value.row(s);
  }
  Matrix h = layer_norm(x, ln0_gamma_, ln0_beta_, tape ? &tape->ln0 : nullptr);
  if (drop) {
    Matrix m = dropout->mask(kSiteEmbedding, n, d);
    h.array() *= m.array();
    if (tape) tape->emb_mask = std::move(m);
  }
  if (tape) {
    tape->segments.assign(segment_ids.begin(), segment_ids.end());
    tape->layers.assign(layers_.size(), LayerTape{});
  }

  const Eigen::Index heads = cfg_.attention_heads;
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    Matrix q = affine(h, L.wq, L.bq);
    Matrix k = affine(h, L.wk, L.bk);
    Matrix v = affine(h, L.wv, L.bv);
    Matrix attn(n, d);
    std::vector<Matrix> probs;
    if (tape) probs.reserve(static_cast<std::size_t>(heads));
    for (Eigen::Index hd = 0; hd < heads; ++hd) {
      Matrix scores = q.middleCols(hd * dh, dh) * k.middleCols(hd * dh, dh).transpose() * scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mx = scores.row(i).maxCoeff();
        scores.row(i) = (scores.row(i).array() - mx).exp();
        scores.row(i) /= scores.row(i).sum();
      }
      attn.middleCols(hd * dh, dh).noalias() = scores * v.middleCols(hd * dh, dh);
      if (tape) probs.push_back(std::move(scores));
    }
    Matrix ao = affine(attn, L.wo, L.bo);
    Matrix attn_mask;
    if (drop) {
      attn_mask = dropout->mask(site_attention(l), n, d);
      ao.array() *= attn_mask.array();
    }
    LayerTape* lt = tape ? &tape->layers[l] : nullptr;
    Matrix h1 = layer_norm(h + ao, L.ln1_gamma, L.ln1_beta, lt ? &lt->ln1 : nullptr);
    Matrix f1 = affine(h1, L.w1, L.b1);
    Matrix g = f1.unaryExpr([](double z) { return gelu(z); });
    Matrix f2 = affine(g, L.w2, L.b2);
    Matrix ffn_mask;
    if (drop) {
      ffn_mask = dropout->mask(site_ffn(l), n, d);
      f2.array() *= ffn_mask.array();
    }
    Matrix h2 = layer_norm(h1 + f2, L.ln2_gamma, L.ln2_beta, lt ? &lt->ln2 : nullptr);
    if (lt) {
      lt->input = std::move(h);
      lt->q = std::move(q);
      lt->k = std::move(k);
      lt->v = std::move(v);
      lt->probs = std::move(probs);
      lt->attn = std::move(attn);
      lt->attn_mask = std::move(attn_mask);
      lt->h1 = std::move(h1);
      lt->f1 = std::move(f1);
      lt->g = std::move(g);
      lt->ffn_mask = std::move(ffn_mask);
    }
    h = std::move(h2);
  }
  return h;
}

Matrix DeskEncoder::encode_backward(const EncoderTape& tape_base, const Matrix& d_contextual) {
  const auto& tape = static_cast<const DeskEncoderTape&>(tape_base);
  const Eigen::Index n = d_contextual.rows();
  const Eigen::Index d = cfg_.hidden_dim;
  const Eigen::Index heads = cfg_.attention_heads;
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix dh_out = d_contextual;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    auto& L = layers_[li];
    const auto& lt = tape.layers[li];

    Matrix dr2 = layer_norm_backward(lt.ln2, dh_out, L.ln2_gamma, L.ln2_beta);
    Matrix dh1 = dr2;
    Matrix df2 = dr2;
    if (lt.ffn_mask.size() > 0) df2.array() *= lt.ffn_mask.array();
    Matrix dg = affine_backward(lt.g, df2, L.w2, L.b2);
    Matrix df1 = dg.array() * lt.f1.unaryExpr([](double z) { return gelu_grad(z); }).array();
    dh1 += affine_backward(lt.h1, df1, L.w1, L.b1);

    Matrix dr1 = layer_norm_backward(lt.ln1, dh1, L.ln1_gamma, L.ln1_beta);
    Matrix dh_in = dr1;
    Matrix dao = dr1;
    if (lt.attn_mask.size() > 0) dao.array() *= lt.attn_mask.array();
    Matrix dattn = affine_backward(lt.attn, dao, L.wo, L.bo);

    Matrix dq(n, d), dk(n, d), dv(n, d);
    for (Eigen::Index hd = 0; hd < heads; ++hd) {
      const Matrix& p = lt.probs[static_cast<std::size_t>(hd)];
      const auto dout = dattn.middleCols(hd * dh, dh);
      Matrix dp = dout * lt.v.middleCols(hd * dh, dh).transpose();
      dv.middleCols(hd * dh, dh).noalias() = p.transpose() * dout;
      Matrix ds(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dot = p.row(i).dot(dp.row(i));
        ds.row(i) = p.row(i).array() * (dp.row(i).array() - dot);
      }
      ds *= scale;
      dq.middleCols(hd * dh, dh).noalias() = ds * lt.k.middleCols(hd * dh, dh);
      dk.middleCols(hd * dh, dh).noalias() = ds.transpose() * lt.q.middleCols(hd * dh, dh);
    }
    dh_in += affine_backward(lt.input, dq, L.wq, L.bq);
    dh_in += affine_backward(lt.input, dk, L.wk, L.bk);
    dh_in += affine_backward(lt.input, dv, L.wv, L.bv);
    dh_out = std::move(dh_in);
  }

  if (tape.emb_mask.size() > 0) dh_out.array() *= tape.emb_mask.array();
  Matrix dx = layer_norm_backward(tape.ln0, dh_out, ln0_gamma_, ln0_beta_);
  position_.grad.topRows(n) += dx;
  for (Eigen::Index i = 0; i < n; ++i) segment_.grad.row(tape.segments[static_cast<std::size_t>(i)]) += dx.row(i);
  return dx;
}

std::vector<Parameter*> DeskEncoder::parameters() {
  std::vector<Parameter*> out = {&token_, &position_, &segment_, &ln0_gamma_, &ln0_beta_};
  for (auto& L : layers_) {
    for (auto* p : {&L.wq, &L.bq, &L.wk, &L.bk, &L.wv, &L.bv, &L.wo, &L.bo, &L.ln1_gamma, &L.ln1_beta, &L.w1,
                    &L.b1, &L.w2, &L.b2, &L.ln2_gamma, &L.ln2_beta}) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<const Parameter*> DeskEncoder::parameters() const {
  auto mut = const_cast<DeskEncoder*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

Json DeskEncoder::describe() const {
  Json j;
  j["type"] = "desk_transformer";
  j["config"] = cfg_.to_json();
  j["vocab_size"] = vocab_size();
  return j;
}

// --- extraction and head ---------------------------------------------------

RowVector extract_representation(const Matrix& contextual, std::size_t cls_position, AcronymSpan span) {
  const auto rows = static_cast<std::size_t>(contextual.rows());
  if (cls_position >= rows || span.start >= rows || span.end >= rows) {
    throw std::out_of_range("extract_representation: index outside " + std::to_string(rows) + " rows");
  }
  const Eigen::Index d = contextual.cols();
  RowVector rep(2 * d);
  rep.head(d) = contextual.row(static_cast<Eigen::Index>(cls_position));
  rep.tail(d) = 0.5 * (contextual.row(static_cast<Eigen::Index>(span.start)) +
                       contextual.row(static_cast<Eigen::Index>(span.end)));
  return rep;
}

void extract_representation_backward(const RowVector& d_rep, std::size_t cls_position, AcronymSpan span,
                                     Matrix& d_contextual) {
  const Eigen::Index d = d_contextual.cols();
  d_contextual.row(static_cast<Eigen::Index>(cls_position)) += d_rep.head(d);
  d_contextual.row(static_cast<Eigen::Index>(span.start)) += 0.5 * d_rep.tail(d);
  d_contextual.row(static_cast<Eigen::Index>(span.end)) += 0.5 * d_rep.tail(d);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

BinaryHead::BinaryHead(std::size_t rep_dim, std::size_t hidden, double dropout, std::uint64_t seed)
    : dropout_rate(dropout),
      w1("head.layer1.weight", ParamGroup::head, static_cast<Eigen::Index>(rep_dim), static_cast<Eigen::Index>(hidden)),
      b1("head.layer1.bias", ParamGroup::head, 1, static_cast<Eigen::Index>(hidden)),
      w2("head.layer2.weight", ParamGroup::head, static_cast<Eigen::Index>(hidden), 1),
      b2("head.layer2.bias", ParamGroup::head, 1, 1) {
  Rng rng(derive_seed(seed, 0x4EADULL));
  w1.init_normal(rng, fan_in_std(w1));
  w2.init_normal(rng, kInitStd);
}

double head_forward(const RowVector& rep, const BinaryHead& head, const DropoutContext* dropout, HeadTape* tape) {
  if (!rep.allFinite()) throw std::domain_error("head_forward: non-finite representation");
  if (rep.size() != head.w1.value.rows()) throw std::invalid_argument("head_forward: representation width mismatch");
  const bool drop = dropout && dropout->active();
  RowVector x = rep;
  RowVector m1, m2;
  if (drop) {
    m1 = dropout->mask(kSiteHeadInput, 1, x.size());
    x.array() *= m1.array();
  }
  RowVector z = x * head.w1.value + head.b1.value;
  RowVector a = z.cwiseMax(0.0);
  if (drop) {
    m2 = dropout->mask(kSiteHeadHidden, 1, a.size());
    a.array() *= m2.array();
  }
  const double logit = a.dot(head.w2.value.col(0).transpose()) + head.b2.value(0, 0);
  const double score = sigmoid(logit);
  if (tape) {
    tape->input = std::move(x);
    tape->mask1 = std::move(m1);
    tape->mask2 = std::move(m2);
    tape->pre_activation = std::move(z);
    tape->hidden = std::move(a);
    tape->logit = logit;
    tape->score = score;
  }
  return score;
}

RowVector head_backward(const HeadTape& tape, BinaryHead& head, double d_logit) {
  head.w2.grad.col(0) += d_logit * tape.hidden.transpose();
  head.b2.grad(0, 0) += d_logit;
  RowVector da = d_logit * head.w2.value.col(0).transpose();
  if (tape.mask2.size() > 0) da.array() *= tape.mask2.array();
  RowVector dz = (da.array() * (tape.pre_activation.array() > 0.0).cast<double>()).matrix();
  head.w1.grad.noalias() += tape.input.transpose() * dz;
  head.b1.grad += dz;
  RowVector dx = dz * head.w1.value.transpose();
  if (tape.mask1.size() > 0) dx.array() *= tape.mask1.array();
  return dx;
}

// --- ScoringModel -------------------------------------------------------------

ScoringModel::ScoringModel(std::unique_ptr<EncoderContract> encoder, BinaryHead head)
    : encoder_(std::move(encoder)), head_(std::move(head)) {
  if (!encoder_) throw std::invalid_argument("ScoringModel: null encoder");
  if (static_cast<std::size_t>(head_.w1.value.rows()) != 2 * encoder_->hidden_dim()) {
    throw std::invalid_argument("ScoringModel: head input width must be twice the encoder width");
  }
}

ScoringModel::ScoringModel(const ScoringModel& other)
    : encoder_(other.encoder_ ? other.encoder_->clone() : nullptr), head_(other.head_) {}

ScoringModel& ScoringModel::operator=(const ScoringModel& other) {
  if (this != &other) {
    encoder_ = other.encoder_ ? other.encoder_->clone() : nullptr;
    head_ = other.head_;
  }
  return *this;
}

std::vector<Parameter*> ScoringModel::parameters() {
  auto out = encoder_->parameters();
  for (auto* p : head_.parameters()) out.push_back(p);
  return out;
}

std::vector<const Parameter*> ScoringModel::parameters() const {
  auto out = static_cast<const EncoderContract&>(*encoder_).parameters();
  for (auto* p : head_.parameters()) out.push_back(p);
  return out;
}

void ScoringModel::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

double ScoringModel::score(const FormattedInput& input, const DropoutContext* dropout) const {
  const Matrix emb = encoder_->embed(input.token_ids);
  const Matrix ctx = encoder_->encode(emb, input.segment_ids, dropout, nullptr);
  return head_forward(extract_representation(ctx, input.cls_position, input.acronym_span), head_, dropout);
}

double ScoringModel::forward(const FormattedInput& input, const DropoutContext* dropout, Trace& trace) const {
  trace.encoder_tape = encoder_->make_tape();
  const Matrix emb = encoder_->embed(input.token_ids);
  trace.contextual = encoder_->encode(emb, input.segment_ids, dropout, trace.encoder_tape.get());
  return head_forward(extract_representation(trace.contextual, input.cls_position, input.acronym_span), head_,
                      dropout, &trace.head);
}

void ScoringModel::backward(const FormattedInput& input, const Trace& trace, double d_logit) {
  const RowVector d_rep = head_backward(trace.head, head_, d_logit);
  Matrix d_ctx = Matrix::Zero(trace.contextual.rows(), trace.contextual.cols());
  extract_representation_backward(d_rep, input.cls_position, input.acronym_span, d_ctx);
  const Matrix d_emb = encoder_->encode_backward(*trace.encoder_tape, d_ctx);
  encoder_->embed_backward(input.token_ids, d_emb);
}

ScoringModel make_desk_model(const DeskEncoderConfig& cfg, std::size_t vocab_size, double dropout_rate,
                             std::uint64_t seed) {
  auto encoder = std::make_unique<DeskEncoder>(cfg, vocab_size, seed);
  const auto d = static_cast<std::size_t>(cfg.hidden_dim);
  // Head hidden width equals the encoder width.
  BinaryHead head(2 * d, d, dropout_rate, seed);
  return ScoringModel(std::move(encoder), std::move(head));
}

double score_pair(const PairInstance& instance, const Tokenizer& tok, const ScoringModel& model,
                  const DropoutContext* dropout) {
  return model.score(encode_pair(instance, tok), dropout);
}

std::vector<Matrix> snapshot_parameters(const ScoringModel& model) {
  std::vector<Matrix> out;
  for (const auto* p : model.parameters()) out.push_back(p->value);
  return out;
}

void restore_parameters(ScoringModel& model, const std::vector<Matrix>& values) {
  auto params = model.parameters();
  if (params.size() != values.size()) throw std::invalid_argument("restore_parameters: count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->value.rows() != values[i].rows() || params[i]->value.cols() != values[i].cols()) {
      throw std::invalid_argument("restore_parameters: shape mismatch for " + params[i]->name);
    }
    params[i]->value = values[i];
  }
}

}  // namespace acro
