#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "acro/core_types.hpp"
#include "acro/errors.hpp"
#include "test_support.hpp"

using namespace acro;
using acro::testing::make_sample;

namespace {

ExpansionDictionary svm_dict() {
  ExpansionDictionary d;
  d.add("SVM", {"support vector machine", "state vector machine"});
  return d;
}

}  // namespace

TEST(NormalizeExpansion, LowercasesAndCollapsesWhitespace) {
  EXPECT_EQ(normalize_expansion("  Support   Vector\tMachine "), "support vector machine");
  EXPECT_EQ(normalize_expansion(""), "");
  EXPECT_TRUE(same_expansion("Support Vector Machine", "support  vector machine"));
  EXPECT_FALSE(same_expansion("support vector machine", "state vector machine"));
}

TEST(ValidateSample, SvmSampleIsValid) {
  const auto s = make_sample("1", "we train an SVM on the features", 3, "support vector machine");
  EXPECT_TRUE(validate_sample(s, svm_dict()).empty());
}

TEST(ValidateSample, IndexEqualToLengthIsOneViolation) {
  auto s = make_sample("1", "we train an SVM", 0, "support vector machine");
  s.acronym_index = s.tokens.size();
  const auto v = validate_sample(s, svm_dict());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("out of range"), std::string::npos);
}

TEST(ValidateSample, UnknownGoldIsOneViolation) {
  const auto s = make_sample("1", "we train an SVM", 3, "foo");
  const auto v = validate_sample(s, svm_dict());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("unknown expansion"), std::string::npos);
}

TEST(ValidateSample, EmptyTokensAndEmptyStrings) {
  Sample s;
  s.id = "e";
  EXPECT_EQ(validate_sample(s, svm_dict()).size(), 1u);
  s.tokens = {"a", "", "SVM"};
  s.acronym_index = 2;
  EXPECT_EQ(validate_sample(s, svm_dict()).size(), 1u);
}

TEST(ValidateSample, UnlabeledSampleNeedsNoDictionaryEntry) {
  const auto s = make_sample("1", "the XYZ result", 1);
  EXPECT_TRUE(validate_sample(s, svm_dict()).empty());
}

TEST(ValidateSample, GoldMatchIsCaseInsensitive) {
  const auto s = make_sample("1", "an SVM", 1, "Support Vector  Machine");
  EXPECT_TRUE(validate_sample(s, svm_dict()).empty());
}

TEST(ExpansionDictionary, PreservesOrderAndRejectsDuplicates) {
  ExpansionDictionary d;
  d.add("B", {"beta", "alpha"});
  d.add("A", {"x"});
  ASSERT_EQ(d.entries().size(), 2u);
  EXPECT_EQ(d.entries()[0].first, "B");
  EXPECT_EQ(d.candidates("B"), (std::vector<std::string>{"beta", "alpha"}));
  EXPECT_EQ(d.index_of("B", "ALPHA"), 1u);
  EXPECT_FALSE(d.index_of("B", "gamma").has_value());
  EXPECT_THROW(d.add("C", {"x", "x"}), ValidationError);
  EXPECT_THROW(d.add("C", {"x", " X "}), ValidationError);
  EXPECT_THROW(d.add("C", {}), ValidationError);
  EXPECT_THROW(d.add("A", {"y"}), ValidationError);
  EXPECT_THROW(d.candidates("Z"), MissingAcronymError);
}

TEST(ArgmaxFirst, TiesGoToLowestIndex) {
  const std::vector<double> v = {0.2, 0.7, 0.7, 0.1};
  EXPECT_EQ(argmax_first(v), 1u);
  const std::vector<double> w = {0.5, 0.5, 0.5};
  EXPECT_EQ(argmax_first(w), 0u);
}

TEST(MakePrediction, SelectsMaxInDictionaryOrder) {
  const std::vector<std::string> cands = {"a", "b", "c"};
  const std::vector<double> scores = {0.3, 0.9, 0.9};
  const auto p = make_prediction("id", cands, scores);
  EXPECT_EQ(p.selected, "b");
  EXPECT_DOUBLE_EQ(p.max_score(), 0.9);
  EXPECT_DOUBLE_EQ(*p.score_of("c"), 0.9);
  EXPECT_FALSE(p.score_of("d").has_value());
  ASSERT_EQ(p.scores.size(), 3u);
  EXPECT_EQ(p.scores[0].first, "a");
}

// Argmax invariance under strictly increasing maps, random score vectors.
TEST(MakePrediction, SelectionInvariantUnderMonotoneMaps) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_int_distribution<int> level(0, 4);  // coarse grid to force ties
  for (int trial = 0; trial < 500; ++trial) {
    const int n = len(gen);
    std::vector<std::string> cands;
    std::vector<double> s;
    for (int i = 0; i < n; ++i) {
      cands.push_back("e" + std::to_string(i));
      s.push_back(0.05 + 0.2 * level(gen));
    }
    const auto base = make_prediction("x", cands, s).selected;
    std::vector<double> logit, cube, shifted;
    for (double v : s) {
      logit.push_back(std::log(v / (1 - v)));
      cube.push_back(v * v * v);
      shifted.push_back(3.0 * v + 1.0);
    }
    EXPECT_EQ(make_prediction("x", cands, logit).selected, base);
    EXPECT_EQ(make_prediction("x", cands, cube).selected, base);
    EXPECT_EQ(make_prediction("x", cands, shifted).selected, base);
  }
}

TEST(TrainConfig, DefaultsAreValid) {
  const TrainConfig c;
  EXPECT_TRUE(c.violations().empty());
  EXPECT_EQ(c.batch_size, 32);
  EXPECT_EQ(c.epochs, 15);
  EXPECT_DOUBLE_EQ(c.lr_encoder, 1e-5);
  EXPECT_DOUBLE_EQ(c.lr_head, 5e-4);
  EXPECT_DOUBLE_EQ(c.lr_decay_factor, 0.1);
  EXPECT_DOUBLE_EQ(c.lr_min, 5e-7);
  EXPECT_EQ(c.negatives_per_batch, c.batch_size);
  EXPECT_DOUBLE_EQ(c.pseudo_threshold, 0.95);
  EXPECT_DOUBLE_EQ(c.mask_rate, 0.15);
  EXPECT_DOUBLE_EQ(c.dropout_rate, 0.1);
}

TEST(TrainConfig, ViolationsAreReported) {
  TrainConfig c;
  c.lr_min = 1.0;
  EXPECT_EQ(c.violations().size(), 2u);
  c = TrainConfig{};
  c.lr_decay_factor = 1.0;
  EXPECT_EQ(c.violations().size(), 1u);
  c.lr_decay_factor = 0.0;
  EXPECT_EQ(c.violations().size(), 1u);
  c = TrainConfig{};
  c.batch_size = 0;
  c.negatives_per_batch = -1;
  c.adversarial_epsilon = -0.5;
  c.pseudo_threshold = 1.0;
  EXPECT_EQ(c.violations().size(), 4u);
  EXPECT_THROW(c.validate(), ValidationError);
  c = TrainConfig{};
  c.negatives_per_batch = 0;
  c.adversarial_epsilon = 0.0;
  EXPECT_NO_THROW(c.validate());
}

TEST(HarmonicF1, ZeroWhenBothZero) {
  EXPECT_EQ(harmonic_f1(0.0, 0.0), 0.0);
  EXPECT_NEAR(harmonic_f1(0.75, 0.75), 0.75, 1e-15);
  EXPECT_NEAR(harmonic_f1(1.0, 0.5), 2.0 / 3.0, 1e-15);
}
