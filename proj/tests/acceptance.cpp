// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "acro/cli.hpp"
#include "acro/data_ingest.hpp"
#include "acro/eval_report.hpp"
#include "acro/pseudo_label.hpp"
#include "acro/train_engine.hpp"
#include "test_support.hpp"

using namespace acro;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr double kOverfitF1 = 0.95;
constexpr double kOverfitSeconds = 300.0;
constexpr double kMetricTol = 1e-9;
constexpr double kGradTol = 1e-3;
constexpr double kDeltaNormTol = 1e-6;
constexpr double kTinyEpsLossTol = 1e-3;
constexpr double kPseudoThreshold = 0.95;
constexpr int kSeeds = 5;

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& check) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS " : "FAIL ") << name << " | " << v.detail << " | " << std::fixed
            << std::setprecision(1) << secs << "s" << std::endl;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Overfit model shared by the overfit and harvest criteria.
struct Overfit {
  SyntheticSpec spec;
  SyntheticCorpus corpus;
  Tokenizer tok;
  TrainConfig cfg;
  ScoringModel model;
  double seconds = 0.0;
};

Overfit& overfit() {
  static Overfit o = [] {
    Overfit o;
    o.corpus = make_synthetic_corpus(o.spec);  // 5 acronyms, 2-3 expansions, 200 samples
    o.tok = build_vocab(o.corpus.samples, o.corpus.dict, 1);
    o.cfg.epochs = 50;
    o.cfg.batch_size = 8;
    o.cfg.negatives_per_batch = 8;
    o.cfg.lr_encoder = 3e-4;
    o.cfg.lr_head = 3e-4;
    const auto t0 = Clock::now();
    o.model = train(o.corpus.samples, {}, o.corpus.dict, o.tok, o.cfg,
                    make_desk_model(DeskEncoderConfig{}, o.tok.size(), o.cfg.dropout_rate, o.cfg.seed))
                  .model;
    o.seconds = elapsed(t0);
    return o;
  }();
  return o;
}

Verdict overfit_smoke() {
  auto& o = overfit();
  const auto m = evaluate(o.corpus.samples, predict_all(o.corpus.samples, o.model, o.corpus.dict, o.tok));
  const bool ok = m.f1 >= kOverfitF1 && o.seconds < kOverfitSeconds;
  return {ok, "train macro F1 " + fmt(m.f1) + " (need >= " + fmt(kOverfitF1, 2) + "), train time " +
                  fmt(o.seconds, 1) + "s (need < " + fmt(kOverfitSeconds, 0) + "s)"};
}

// Shared desk-scale setup for the ablation and pseudo-label experiments.
SyntheticSpec ablation_spec(std::uint64_t seed, int samples) {
  SyntheticSpec spec;
  spec.acronyms = 4;
  spec.min_expansions = 2;
  spec.max_expansions = 3;
  spec.samples = samples;
  spec.sentence_length = 6;
  spec.cues_per_sentence = 1;
  spec.cues_per_expansion = 1;
  spec.cue_noise = 0.15;
  spec.skew = 0.5;
  spec.seed = seed;
  return spec;
}

TrainConfig ablation_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.negatives_per_batch = 8;
  cfg.epochs = 8;
  cfg.lr_decay_factor = 0.5;
  cfg.lr_encoder = 1e-3;
  cfg.lr_head = 1e-3;
  cfg.max_seq_len = 32;
  cfg.adversarial_epsilon = 0.05;
  cfg.seed = seed;
  return cfg;
}

const DeskEncoderConfig kAblationEncoder = acro::testing::tiny_encoder(64, 1, 2, 128, 32);

// b is not worse than a beyond one (combined) standard error.
bool not_worse(const std::vector<double>& a, const std::vector<double>& b) {
  using acro::testing::mean_of;
  using acro::testing::standard_error;
  const double tol = std::sqrt(std::pow(standard_error(a), 2) + std::pow(standard_error(b), 2));
  return mean_of(b) >= mean_of(a) - tol - 1e-12;
}

std::string summary(const std::vector<double>& v) {
  return fmt(acro::testing::mean_of(v)) + "+-" + fmt(acro::testing::standard_error(v));
}

Verdict ablation_direction() {
  const auto corpus = make_synthetic_corpus(ablation_spec(11, 2000));
  const auto sp = split(corpus.samples, 0.2, 0);
  const auto tok = build_vocab(sp.train, corpus.dict, 1);
  std::vector<double> plain, dynamic, adversarial;
  for (int s = 0; s < kSeeds; ++s) {
    for (int mode = 0; mode < 3; ++mode) {
      auto cfg = ablation_config(static_cast<std::uint64_t>(s));
      cfg.dynamic_negatives = mode > 0;
      TrainOptions opts;
      opts.adversarial = mode == 2;
      const auto r = train(sp.train, sp.dev, corpus.dict, tok, cfg,
                           make_desk_model(kAblationEncoder, tok.size(), cfg.dropout_rate, cfg.seed), opts);
      (mode == 0 ? plain : mode == 1 ? dynamic : adversarial).push_back(r.state.best_dev_f1);
    }
  }
  const double mf = mf_baseline(sp.train, sp.dev, corpus.dict).f1;
  const bool ok = not_worse(plain, dynamic) && not_worse(dynamic, adversarial);
  return {ok, "dev F1 plain " + summary(plain) + ", +dynamic " + summary(dynamic) + ", +dynamic+adversarial " +
                  summary(adversarial) + " (mf baseline " + fmt(mf) + ")"};
}

Verdict metric_oracle() {
  const auto m = evaluate_labels({"A", "A", "B"}, {"A", "B", "B"});
  const double expect_f1 = (2 * 1 * 0.5 / 1.5 + 2 * 0.5 * 1 / 1.5) / 2;
  const bool ok = std::abs(m.precision - 0.75) <= kMetricTol && std::abs(m.recall - 0.75) <= kMetricTol &&
                  std::abs(m.f1 - expect_f1) <= kMetricTol && std::abs(m.f1 - 0.6667) < 1e-4;
  return {ok, "P " + fmt(m.precision, 10) + " R " + fmt(m.recall, 10) + " F1 " + fmt(m.f1, 10)};
}

Verdict gradient_correctness() {
  double worst = 0.0;
  std::string where;
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    auto f = acro::testing::grad_fixture(seed);
    const auto g = acro::testing::gradient_check(f.model, f.batch);
    if (g.worst > worst) {
      worst = g.worst;
      where = g.worst_name + " group @ seed " + std::to_string(seed);
    }
  }
  std::ostringstream d;
  d << "worst relative error " << std::scientific << std::setprecision(2) << worst << " (" << where << ")";
  return {worst < kGradTol, d.str()};
}

Verdict adversarial_contract() {
  double worst_norm_err = 0.0;
  bool restored = true;
  int steps = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (double eps : {1e-3, 0.05, 1.0}) {
      auto f = acro::testing::grad_fixture(seed);
      f.model.zero_grad();
      batch_forward_backward(f.model, f.batch);
      const auto before = snapshot_parameters(f.model);
      const auto r = adversarial_step(f.model, f.batch, eps);
      const auto after = snapshot_parameters(f.model);
      worst_norm_err = std::max(worst_norm_err, std::abs(r.delta_norm - eps));
      for (std::size_t i = 0; i < before.size(); ++i) {
        restored &= std::memcmp(before[i].data(), after[i].data(),
                                sizeof(double) * static_cast<std::size_t>(before[i].size())) == 0;
      }
      ++steps;
    }
  }

  const auto corpus = make_synthetic_corpus(ablation_spec(5, 200));
  const auto tok = build_vocab(corpus.samples, corpus.dict, 1);
  auto cfg = ablation_config(0);
  cfg.epochs = 1;
  cfg.adversarial_epsilon = 1e-6;
  const auto init = make_desk_model(kAblationEncoder, tok.size(), cfg.dropout_rate, 0);
  const auto plain = train(corpus.samples, {}, corpus.dict, tok, cfg, init, TrainOptions{false});
  const auto adv = train(corpus.samples, {}, corpus.dict, tok, cfg, init, TrainOptions{true});
  const double diff = std::abs(plain.state.epoch_history[0].train_loss - adv.state.epoch_history[0].train_loss);

  std::ostringstream d;
  d << std::scientific << std::setprecision(2) << steps << " steps, max | |delta| - eps | " << worst_norm_err
    << ", table restored bitwise: " << (restored ? "yes" : "no") << ", epoch-1 loss diff at eps 1e-6: " << diff;
  return {worst_norm_err <= kDeltaNormTol && restored && diff < kTinyEpsLossTol, d.str()};
}

Verdict dynamic_sampling_contract() {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> count(1, 400), bs(1, 64), npb(1, 64);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t pos = count(gen), neg = count(gen);
    TrainConfig cfg;
    cfg.batch_size = bs(gen);
    cfg.negatives_per_batch = npb(gen);
    std::vector<std::uint8_t> labels(pos, 1);
    labels.insert(labels.end(), neg, 0);
    std::shuffle(labels.begin(), labels.end(), gen);
    const auto plans = plan_batches(labels, cfg, gen());
    if (plans.size() * static_cast<std::size_t>(cfg.negatives_per_batch) < neg) continue;
    ++checked;
    std::vector<int> seen(labels.size(), 0);
    for (const auto& p : plans) {
      for (auto i : p.positives) {
        if (labels[i] != 1) return {false, "negative in positive slot"};
        ++seen[i];
      }
      for (auto i : p.negatives) {
        if (labels[i] != 0) return {false, "positive in negative slot"};
        ++seen[i];
      }
      if (p.positives.size() == static_cast<std::size_t>(cfg.batch_size) &&
          neg >= static_cast<std::size_t>(cfg.negatives_per_batch) &&
          p.negatives.size() != static_cast<std::size_t>(cfg.negatives_per_batch)) {
        return {false, "full batch with wrong balance at trial " + std::to_string(trial)};
      }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == 1 && seen[i] != 1) return {false, "positive not seen exactly once"};
      if (labels[i] == 0 && seen[i] < 1) return {false, "negative never seen at trial " + std::to_string(trial)};
    }
  }
  return {checked > 100, std::to_string(checked) + " random epochs checked: positives once, negatives covered, "
                                                   "full batches balanced"};
}

Verdict pseudo_contract() {
  // Harvest against an independent rescoring pass.
  auto& o = overfit();
  const auto unlabeled = synthetic_samples(o.spec, 100, 4242, "u");
  std::vector<std::string> brute;
  for (const auto& s : unlabeled) {
    double best = -1.0;
    for (const auto& c : o.corpus.dict.candidates(s.acronym())) best = std::max(best, o.model.score(format_input(c, s, o.tok)));
    if (best > kPseudoThreshold) brute.push_back(s.id);
  }
  std::vector<std::string> got;
  for (const auto& p : harvest(o.model, unlabeled, o.corpus.dict, o.tok, kPseudoThreshold)) got.push_back(p.underlying.id);
  const bool harvest_ok = got == brute;

  // Pseudo labels that are correct by construction must not hurt.
  std::vector<double> before, after;
  for (int s = 0; s < kSeeds; ++s) {
    const auto spec = ablation_spec(31, 300);
    const auto corpus = make_synthetic_corpus(spec);
    const auto dev = synthetic_samples(spec, 400, 1000 + s, "dev-");
    auto extra = synthetic_samples(spec, 300, 2000 + s, "unl-");
    std::vector<PseudoSample> pseudo;
    for (auto& x : extra) {
      PseudoSample p;
      p.assigned_expansion = *x.gold_expansion;
      x.gold_expansion.reset();
      p.underlying = x;
      p.confidence = 0.99;
      pseudo.push_back(std::move(p));
    }
    std::vector<Sample> vocab_source = corpus.samples;
    for (const auto& p : pseudo) vocab_source.push_back(p.underlying);
    const auto tok = build_vocab(vocab_source, corpus.dict, 1);
    auto cfg = ablation_config(static_cast<std::uint64_t>(s));
    cfg.epochs = 8;
    const auto fresh = [&] { return make_desk_model(kAblationEncoder, tok.size(), cfg.dropout_rate, cfg.seed); };
    before.push_back(train(corpus.samples, dev, corpus.dict, tok, cfg, fresh()).state.best_dev_f1);
    after.push_back(merge_and_retrain(corpus.samples, pseudo, dev, corpus.dict, tok, cfg, fresh()).state.best_dev_f1);
  }
  const bool merge_ok = not_worse(before, after);
  return {harvest_ok && merge_ok, "harvest " + std::to_string(got.size()) + " vs brute force " +
                                      std::to_string(brute.size()) + " of 100 (" + (harvest_ok ? "equal" : "DIFFER") +
                                      "); dev F1 before " + summary(before) + ", after merge " + summary(after)};
}

Verdict schedule_contract() {
  TrainConfig cfg;
  auto state = TrainState::initial(cfg);
  const std::vector<double> f1s = {0.5, 0.5, 0.6, 0.6, 0.6, 0.6, 0.6};
  const std::vector<double> expect = {1e-5, 1e-6, 1e-6, 5e-7, 5e-7, 5e-7, 5e-7};
  std::ostringstream d;
  d << "encoder lr:";
  bool ok = true;
  for (std::size_t i = 0; i < f1s.size(); ++i) {
    state = lr_schedule_update(state, f1s[i], cfg);
    d << " " << std::scientific << std::setprecision(0) << state.lr_encoder_current;
    ok &= std::abs(state.lr_encoder_current - expect[i]) <= 1e-18;
    ok &= state.lr_head_current >= cfg.lr_min;
  }
  return {ok, d.str()};
}

Verdict cli_determinism() {
  const auto root = acro::testing::scratch_dir("acceptance_cli");
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) {
    const int code = cli::run(args, sink, sink);
    if (code != 0) throw std::runtime_error("command failed (" + std::to_string(code) + "): " + sink.str());
  };
  const auto data = root / "data";
  run({"synth", "--out", data.string(), "--acronyms", "3", "--train-samples", "60", "--dev-samples", "30",
       "--unlabeled-samples", "30", "--sentence-length", "6"});
  const std::vector<std::string> model = {"--encoder-layers", "1",  "--hidden-dim", "16", "--attention-heads", "2",
                                          "--feedforward-dim", "32", "--max-seq-len", "32", "--epochs",         "2",
                                          "--batch-size",      "8",  "--negatives-per-batch", "8"};
  const std::vector<std::string> files = {"stats/stats.json",          "tapt/tapt_log.json",
                                          "train/metrics.json",        "train/dev_predictions.json",
                                          "pseudo/metrics.json",       "pseudo/pseudo.json",
                                          "predict/predictions.json",  "eval/metrics.json",
                                          "eval/errors.json",          "mf/metrics.json"};
  std::vector<std::vector<std::string>> contents(2);
  for (int rep = 0; rep < 2; ++rep) {
    const auto out = root / ("run" + std::to_string(rep));
    const auto d = [&](const char* f) { return (data / f).string(); };
    const auto o = [&](const char* f) { return (out / f).string(); };
    auto with_model = [&](std::vector<std::string> a) {
      a.insert(a.end(), model.begin(), model.end());
      return a;
    };
    run({"stats", "--data", d("train.json"), "--dict", d("dict.json"), "--out", o("stats")});
    run(with_model({"tapt", "--data", d("train.json"), "--dict", d("dict.json"), "--out", o("tapt"), "--tapt-epochs", "1"}));
    run({"train", "--train", d("train.json"), "--dev", d("dev.json"), "--dict", d("dict.json"), "--out", o("train"),
         "--from-tapt", o("tapt/encoder.ckpt"), "--adversarial", "--adversarial-epsilon", "0.05", "--epochs", "2",
         "--max-seq-len", "32", "--batch-size", "8", "--negatives-per-batch", "8"});
    run({"pseudo", "--model", o("train/model.ckpt"), "--train", d("train.json"), "--unlabeled", d("unlabeled.json"),
         "--dev", d("dev.json"), "--dict", d("dict.json"), "--out", o("pseudo"), "--from-tapt", o("tapt/encoder.ckpt"),
         "--pseudo-threshold", "0.5"});
    run({"predict", "--model", o("pseudo/model.ckpt"), "--data", d("dev.json"), "--dict", d("dict.json"), "--out",
         o("predict")});
    run({"eval", "--data", d("dev.json"), "--dict", d("dict.json"), "--out", o("eval"), "--predictions",
         o("predict/predictions.json")});
    run({"eval", "--data", d("dev.json"), "--dict", d("dict.json"), "--out", o("mf"), "--baseline", "mf", "--train",
         d("train.json")});
    for (const auto& f : files) contents[rep].push_back(read_text_file(out / f));
  }
  std::string differing;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (contents[0][i] != contents[1][i]) differing += " " + files[i];
  }
  return {differing.empty(), std::to_string(files.size()) + " output files compared across two runs" +
                                 (differing.empty() ? ", all byte-identical" : "; differ:" + differing)};
}

}  // namespace

int main() {
  report("overfit-smoke", overfit_smoke);
  report("ablation-direction", ablation_direction);
  report("metric-oracle", metric_oracle);
  report("gradient-correctness", gradient_correctness);
  report("adversarial-contract", adversarial_contract);
  report("dynamic-sampling-contract", dynamic_sampling_contract);
  report("pseudo-label-contract", pseudo_contract);
  report("schedule-contract", schedule_contract);
  report("cli-determinism", cli_determinism);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
