#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <sstream>

#include "acro/errors.hpp"
#include "acro/eval_report.hpp"
#include "acro/train_engine.hpp"
#include "test_support.hpp"

using namespace acro;
using acro::testing::tiny_encoder;

namespace {

std::vector<std::uint8_t> make_labels(std::size_t pos, std::size_t neg, std::uint64_t shuffle_seed) {
  std::vector<std::uint8_t> labels(pos, 1);
  labels.insert(labels.end(), neg, 0);
  std::mt19937_64 gen(shuffle_seed);
  std::shuffle(labels.begin(), labels.end(), gen);
  return labels;
}

TrainConfig batch_config(int batch, int negatives) {
  TrainConfig cfg;
  cfg.batch_size = batch;
  cfg.negatives_per_batch = negatives;
  return cfg;
}

struct TinySetup {
  SyntheticCorpus corpus;
  Tokenizer tok;
  TrainConfig cfg;
};

TinySetup tiny_setup(int samples, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.acronyms = 3;
  spec.samples = samples;
  spec.sentence_length = 6;
  spec.seed = seed;
  TinySetup s{make_synthetic_corpus(spec), {}, {}};
  s.tok = build_vocab(s.corpus.samples, s.corpus.dict, 1);
  s.cfg.batch_size = 4;
  s.cfg.negatives_per_batch = 4;
  s.cfg.epochs = 2;
  s.cfg.lr_encoder = 1e-3;
  s.cfg.lr_head = 1e-3;
  s.cfg.max_seq_len = 32;
  s.cfg.seed = seed;
  return s;
}

}  // namespace

TEST(PlanBatches, SixtyFourEachGivesTwoDisjointBalancedBatches) {
  const auto labels = make_labels(64, 64, 0);
  const auto plans = plan_batches(labels, batch_config(32, 32), 0);
  ASSERT_EQ(plans.size(), 2u);
  std::set<std::size_t> seen_neg;
  for (const auto& p : plans) {
    EXPECT_EQ(p.positives.size(), 32u);
    EXPECT_EQ(p.negatives.size(), 32u);
    for (auto i : p.negatives) {
      EXPECT_EQ(labels[i], 0);
      EXPECT_TRUE(seen_neg.insert(i).second);
    }
    for (auto i : p.positives) EXPECT_EQ(labels[i], 1);
  }
  EXPECT_EQ(seen_neg.size(), 64u);
}

TEST(PlanBatches, ZeroNegativesGivesPositivesOnly) {
  const auto labels = make_labels(40, 90, 1);
  for (const auto& p : plan_batches(labels, batch_config(16, 0), 3)) {
    EXPECT_TRUE(p.negatives.empty());
    EXPECT_FALSE(p.positives.empty());
  }
}

TEST(PlanBatches, EpochSeedsChangeAssignments) {
  const auto labels = make_labels(64, 64, 2);
  const auto cfg = batch_config(32, 32);
  const auto a = plan_batches(labels, cfg, 1), b = plan_batches(labels, cfg, 2);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].negatives != b[i].negatives;
  EXPECT_TRUE(differs);
  const auto again = plan_batches(labels, cfg, 1);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].negatives, again[i].negatives);
}

TEST(PlanBatches, NoPositivesThrows) {
  const auto labels = make_labels(0, 10, 0);
  EXPECT_THROW(plan_batches(labels, batch_config(4, 4), 0), ValidationError);
}

// Random label sets and batch shapes: coverage and balance.
TEST(PlanBatches, CoverageAndBalanceProperty) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> count(1, 120), bs(1, 20), npb(0, 40);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t pos = count(gen), neg = count(gen) - 1;
    const auto cfg = batch_config(bs(gen), npb(gen));
    const auto labels = make_labels(pos, neg, gen());
    const auto plans = plan_batches(labels, cfg, gen());

    std::vector<int> pos_seen(labels.size(), 0), neg_seen(labels.size(), 0);
    std::size_t total_neg_slots = 0;
    for (const auto& p : plans) {
      for (auto i : p.positives) {
        ASSERT_EQ(labels[i], 1);
        ++pos_seen[i];
      }
      std::set<std::size_t> in_batch(p.negatives.begin(), p.negatives.end());
      EXPECT_EQ(in_batch.size(), p.negatives.size()) << "duplicate negative inside one batch";
      for (auto i : p.negatives) {
        ASSERT_EQ(labels[i], 0);
        ++neg_seen[i];
      }
      total_neg_slots += p.negatives.size();
      if (p.positives.size() == static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t expect_neg = std::min<std::size_t>(cfg.negatives_per_batch, neg);
        EXPECT_EQ(p.negatives.size(), expect_neg);
        if (expect_neg == static_cast<std::size_t>(cfg.negatives_per_batch)) {
          // positives : negatives equals batch_size : negatives_per_batch
          EXPECT_EQ(p.positives.size() * cfg.negatives_per_batch, p.negatives.size() * cfg.batch_size);
        }
      }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == 1) EXPECT_EQ(pos_seen[i], 1);
    }
    if (plans.size() * static_cast<std::size_t>(cfg.negatives_per_batch) >= neg) {
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 0) EXPECT_GE(neg_seen[i], 1) << "trial " << trial;
      }
    }
    // each negative appears at most ceil(slots / pool) times
    if (neg > 0) {
      const int cap = static_cast<int>((total_neg_slots + neg - 1) / neg);
      for (std::size_t i = 0; i < labels.size(); ++i) EXPECT_LE(neg_seen[i], cap);
    }
  }
}

TEST(PlanBatches, PartialBatchDrawsProportionalNegatives) {
  const auto labels = make_labels(40, 40, 5);
  const auto plans = plan_batches(labels, batch_config(32, 32), 0);
  ASSERT_EQ(plans.size(), 2u);
  EXPECT_EQ(plans[1].positives.size(), 8u);
  EXPECT_EQ(plans[1].negatives.size(), 8u);
}

TEST(PlanBatches, PartialBatchFinishesTheFirstPass) {
  const auto labels = make_labels(40, 60, 5);
  const auto plans = plan_batches(labels, batch_config(32, 32), 0);
  ASSERT_EQ(plans.size(), 2u);
  EXPECT_EQ(plans[1].negatives.size(), 28u);
  std::set<std::size_t> all(plans[0].negatives.begin(), plans[0].negatives.end());
  all.insert(plans[1].negatives.begin(), plans[1].negatives.end());
  EXPECT_EQ(all.size(), 60u);
}

TEST(PlanStaticBatches, CoversEveryPairOnce) {
  const auto labels = make_labels(30, 70, 6);
  const auto plans = plan_static_batches(labels, batch_config(16, 16), 4);
  std::vector<int> seen(labels.size(), 0);
  for (const auto& p : plans) {
    EXPECT_LE(p.positives.size() + p.negatives.size(), 16u);
    for (auto i : p.positives) ++seen[i];
    for (auto i : p.negatives) ++seen[i];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(BinaryLoss, Examples) {
  const std::vector<double> s1 = {0.5, 0.5};
  const std::vector<std::uint8_t> l1 = {1, 0};
  EXPECT_NEAR(binary_loss(s1, l1), std::log(2.0), 1e-12);
  const std::vector<double> s2 = {0.9, 0.2};
  EXPECT_NEAR(binary_loss(s2, l1), -(std::log(0.9) + std::log(0.8)) / 2, 1e-12);
  const std::vector<double> s3 = {1.0, 0.0};
  EXPECT_NEAR(binary_loss(s3, l1), -std::log(1 - kScoreClamp), 1e-12);
  const std::vector<double> s4 = {0.0, 1.0};
  EXPECT_NEAR(binary_loss(s4, l1), -std::log(kScoreClamp), 1e-9);
  EXPECT_TRUE(std::isfinite(binary_loss(s4, l1)));
}

TEST(AdversarialStep, PerturbationNormAndExactRestore) {
  for (std::uint64_t seed : {1u, 2u}) {
    for (double eps : {1e-3, 0.05, 1.0}) {
      auto f = acro::testing::grad_fixture(seed);
      f.model.zero_grad();
      batch_forward_backward(f.model, f.batch);
      const Matrix table_before = f.model.encoder().embedding_table().value;
      const auto params_before = snapshot_parameters(f.model);
      const auto adv = adversarial_step(f.model, f.batch, eps);
      EXPECT_FALSE(adv.skipped);
      EXPECT_NEAR(adv.delta_norm, eps, 1e-6);
      EXPECT_TRUE(std::isfinite(adv.loss));
      const auto params_after = snapshot_parameters(f.model);
      ASSERT_EQ(params_before.size(), params_after.size());
      for (std::size_t i = 0; i < params_before.size(); ++i) {
        EXPECT_EQ(std::memcmp(params_before[i].data(), params_after[i].data(),
                              sizeof(double) * static_cast<std::size_t>(params_before[i].size())),
                  0);
      }
      EXPECT_EQ(std::memcmp(table_before.data(), f.model.encoder().embedding_table().value.data(),
                            sizeof(double) * static_cast<std::size_t>(table_before.size())),
                0);
    }
  }
}

TEST(AdversarialStep, AccumulatesOntoCleanGradient) {
  auto f = acro::testing::grad_fixture(3);
  f.model.zero_grad();
  batch_forward_backward(f.model, f.batch);
  const Matrix clean = f.model.head().w2.grad;
  adversarial_step(f.model, f.batch, 1e-9);
  // a vanishing perturbation doubles the gradient
  EXPECT_LT((f.model.head().w2.grad - 2.0 * clean).norm(), 1e-6 * std::max(1.0, clean.norm()));
}

TEST(AdversarialStep, ZeroGradientIsSkipped) {
  auto f = acro::testing::grad_fixture(4);
  f.model.zero_grad();
  const auto adv = adversarial_step(f.model, f.batch, 1.0);
  EXPECT_TRUE(adv.skipped);
  EXPECT_EQ(adv.delta_norm, 0.0);
  for (const auto* p : f.model.parameters()) EXPECT_EQ(p->grad.norm(), 0.0);
}

TEST(AdversarialStep, UnitNormScalingOfATwoVector) {
  // g = (3, 4), eps 1 -> delta = (0.6, 0.8): check through the table delta.
  auto f = acro::testing::grad_fixture(5);
  f.model.zero_grad();
  auto& table = f.model.encoder().embedding_table();
  table.grad.setZero();
  table.grad(7, 0) = 3.0;
  table.grad(7, 1) = 4.0;
  const double before0 = table.value(7, 0), before1 = table.value(7, 1);
  const auto adv = adversarial_step(f.model, f.batch, 1.0);
  EXPECT_NEAR(adv.delta_norm, 1.0, 1e-12);
  EXPECT_EQ(table.value(7, 0), before0);
  EXPECT_EQ(table.value(7, 1), before1);
}

TEST(LrSchedule, ScriptedSequence) {
  TrainConfig cfg;
  auto state = TrainState::initial(cfg);
  EXPECT_EQ(state.lr_encoder_current, 1e-5);
  EXPECT_EQ(state.lr_head_current, 5e-4);
  const std::vector<double> f1s = {0.5, 0.5, 0.6, 0.6, 0.6, 0.6};
  const std::vector<double> enc = {1e-5, 1e-6, 1e-6, 5e-7, 5e-7, 5e-7};
  const std::vector<double> head = {5e-4, 5e-5, 5e-5, 5e-6, 5e-7, 5e-7};
  for (std::size_t i = 0; i < f1s.size(); ++i) {
    state = lr_schedule_update(state, f1s[i], cfg);
    EXPECT_NEAR(state.lr_encoder_current, enc[i], 1e-18) << "epoch " << i + 1;
    EXPECT_NEAR(state.lr_head_current, head[i], 1e-18) << "epoch " << i + 1;
  }
  EXPECT_EQ(state.best_dev_f1, 0.6);
}

TEST(LrSchedule, NonIncreasingAndBoundedBelow) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    TrainConfig cfg;
    cfg.lr_decay_factor = 0.05 + 0.9 * u(gen);
    auto state = TrainState::initial(cfg);
    double prev_enc = state.lr_encoder_current, prev_head = state.lr_head_current;
    for (int e = 0; e < 30; ++e) {
      state = lr_schedule_update(state, u(gen) < 0.5 ? u(gen) : state.best_dev_f1 * u(gen), cfg);
      EXPECT_LE(state.lr_encoder_current, prev_enc);
      EXPECT_LE(state.lr_head_current, prev_head);
      EXPECT_GE(state.lr_encoder_current, cfg.lr_min);
      EXPECT_GE(state.lr_head_current, cfg.lr_min);
      prev_enc = state.lr_encoder_current;
      prev_head = state.lr_head_current;
    }
  }
}

TEST(Train, ZeroEpochsReturnsInitialModel) {
  auto s = tiny_setup(20, 1);
  s.cfg.epochs = 0;
  const auto initial = make_desk_model(tiny_encoder(), s.tok.size(), 0.1, 1);
  const auto result = train(s.corpus.samples, {}, s.corpus.dict, s.tok, s.cfg, initial);
  EXPECT_EQ(result.best_epoch, 0);
  EXPECT_TRUE(result.state.epoch_history.empty());
  EXPECT_EQ(snapshot_parameters(result.model), snapshot_parameters(initial));
}

TEST(Train, SameSeedIsBitIdentical) {
  auto s = tiny_setup(30, 2);
  auto run = [&] {
    return train(s.corpus.samples, {}, s.corpus.dict, s.tok, s.cfg,
                 make_desk_model(tiny_encoder(), s.tok.size(), 0.1, 2), TrainOptions{true});
  };
  s.cfg.adversarial_epsilon = 0.05;
  const auto a = run(), b = run();
  EXPECT_EQ(snapshot_parameters(a.model), snapshot_parameters(b.model));
  EXPECT_EQ(a.state.epoch_history.back().train_loss, b.state.epoch_history.back().train_loss);
}

TEST(Train, EmptyDevKeepsLastEpochAndSchedule) {
  auto s = tiny_setup(20, 3);
  const auto result = train(s.corpus.samples, {}, s.corpus.dict, s.tok, s.cfg,
                            make_desk_model(tiny_encoder(), s.tok.size(), 0.1, 3));
  EXPECT_EQ(result.best_epoch, s.cfg.epochs);
  for (const auto& r : result.state.epoch_history) EXPECT_EQ(r.lr_encoder, s.cfg.lr_encoder);
}

TEST(Train, ReturnsBestDevEpoch) {
  auto s = tiny_setup(60, 4);
  s.cfg.epochs = 4;
  const auto sp = split(s.corpus.samples, 0.3, 4);
  std::vector<EpochRecord> seen;
  TrainOptions opts;
  opts.on_epoch = [&](const EpochRecord& r) { seen.push_back(r); };
  std::ostringstream log;
  opts.log = &log;
  const auto result =
      train(sp.train, sp.dev, s.corpus.dict, s.tok, s.cfg, make_desk_model(tiny_encoder(), s.tok.size(), 0.1, 4), opts);
  ASSERT_EQ(seen.size(), 4u);
  std::size_t best = 0;
  for (std::size_t i = 1; i < seen.size(); ++i) {
    if (seen[i].dev.f1 > seen[best].dev.f1) best = i;
  }
  EXPECT_EQ(result.best_epoch, static_cast<int>(best) + 1);
  const auto rescored = evaluate(sp.dev, predict_all(sp.dev, result.model, s.corpus.dict, s.tok, 32));
  EXPECT_NEAR(rescored.f1, seen[best].dev.f1, 1e-12);

  std::istringstream lines(log.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = Json::parse(line);
    for (const char* key : {"epoch", "train_loss", "dev_precision", "dev_recall", "dev_f1", "lr_encoder", "lr_head"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    ++n;
  }
  EXPECT_EQ(n, 4);
}

TEST(Train, DivergenceIsReported) {
  auto s = tiny_setup(20, 5);
  auto model = make_desk_model(tiny_encoder(), s.tok.size(), 0.1, 5);
  model.head().b2.value(0, 0) = std::nan("");
  EXPECT_THROW(train(s.corpus.samples, {}, s.corpus.dict, s.tok, s.cfg, model), DivergenceError);
}

TEST(Train, RejectsUnlabeledTrainingData) {
  auto s = tiny_setup(10, 6);
  s.corpus.samples[3].gold_expansion.reset();
  EXPECT_THROW(train(s.corpus.samples, {}, s.corpus.dict, s.tok, s.cfg,
                     make_desk_model(tiny_encoder(), s.tok.size(), 0.1, 6)),
               ValidationError);
}

TEST(Train, TinyAdversarialEpsilonTracksPlainLoss) {
  auto s = tiny_setup(40, 7);
  s.cfg.epochs = 1;
  s.cfg.adversarial_epsilon = 1e-6;
  const auto init = make_desk_model(tiny_encoder(), s.tok.size(), 0.1, 7);
  const auto plain = train(s.corpus.samples, {}, s.corpus.dict, s.tok, s.cfg, init, TrainOptions{false});
  const auto adv = train(s.corpus.samples, {}, s.corpus.dict, s.tok, s.cfg, init, TrainOptions{true});
  EXPECT_LT(std::abs(plain.state.epoch_history[0].train_loss - adv.state.epoch_history[0].train_loss), 1e-3);
}
