#include <gtest/gtest.h>

#include <random>

#include "causalframe/metrics.hpp"
#include "oracles/naive_scorer.hpp"

using namespace causalframe;

namespace {

std::vector<std::string> labels(std::initializer_list<int> v) {
  std::vector<std::string> out;
  for (int x : v) out.push_back(std::to_string(x));
  return out;
}

const LabelScore& row(const ClassReport& r, const std::string& label) {
  for (const auto& s : r.per_label)
    if (s.label == label) return s;
  throw std::runtime_error("missing label " + label);
}

LabeledSpan cause(std::size_t a, std::size_t b, const std::string& id = "s") {
  return {id, SpanClass::Cause, a, b};
}

}  // namespace

TEST(ClassificationReport, HandTalliedFixture) {
  const auto gold = labels({1, 1, 1, 0, 0});
  const auto pred = labels({1, 1, 0, 0, 1});
  const auto r = classification_report(pred, gold);
  EXPECT_EQ(r.accuracy, 0.6);
  EXPECT_NEAR(row(r, "1").score.precision, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(row(r, "1").score.recall, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(row(r, "1").score.f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(row(r, "0").score.precision, 0.5);
  EXPECT_EQ(row(r, "0").score.recall, 0.5);
  EXPECT_EQ(row(r, "0").score.f1, 0.5);
  EXPECT_NEAR(r.macro.f1, 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(r.weighted.f1, 0.6, 1e-15);
  EXPECT_EQ(row(r, "1").support, 3u);
  EXPECT_FALSE(r.zero_division);
}

TEST(ClassificationReport, PerfectPredictions) {
  const auto gold = labels({1, 0, 1, 1, 0, 0, 1});
  const auto r = classification_report(gold, gold);
  EXPECT_EQ(r.accuracy, 1.0);
  for (const auto& s : r.per_label) {
    EXPECT_EQ(s.score.precision, 1.0);
    EXPECT_EQ(s.score.recall, 1.0);
    EXPECT_EQ(s.score.f1, 1.0);
  }
  EXPECT_EQ(r.macro.f1, 1.0);
  EXPECT_EQ(r.weighted.f1, 1.0);
  EXPECT_EQ(r.weighted.precision, 1.0);
}

TEST(ClassificationReport, ZeroDivisionFlag) {
  const auto gold = labels({1, 1, 1});
  const auto pred = labels({0, 0, 0});
  const auto r = classification_report(pred, gold);
  EXPECT_TRUE(r.zero_division);
  EXPECT_EQ(row(r, "0").score.recall, 0.0);
  EXPECT_TRUE(row(r, "0").score.recall_undefined);
  EXPECT_EQ(row(r, "1").score.precision, 0.0);
  EXPECT_TRUE(row(r, "1").score.precision_undefined);
}

TEST(ClassificationReport, LengthMismatch) {
  const auto a = labels({1, 0});
  const auto b = labels({1});
  EXPECT_THROW(classification_report(a, b), ConfigError);
}

TEST(ClassificationReport, MatchesNaiveScorerOnRandomFixtures) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const std::size_t k = 2 + rng() % 3;
    std::vector<std::string> gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(std::to_string(rng() % k));
      pred.push_back(std::to_string(rng() % k));
    }
    const auto r = classification_report(pred, gold);
    const auto o = oracle::naive_classification(pred, gold);
    ASSERT_EQ(r.per_label.size(), o.labels.size());
    for (std::size_t i = 0; i < o.labels.size(); ++i) {
      ASSERT_EQ(r.per_label[i].label, o.labels[i]);
      ASSERT_EQ(r.per_label[i].score.precision, o.per_label[i].p);
      ASSERT_EQ(r.per_label[i].score.recall, o.per_label[i].r);
      ASSERT_EQ(r.per_label[i].score.f1, o.per_label[i].f1);
      ASSERT_EQ(r.per_label[i].support, o.per_label[i].support);
    }
    ASSERT_EQ(r.accuracy, o.accuracy);
    ASSERT_EQ(r.macro.f1, o.macro_f1);
    ASSERT_EQ(r.macro.precision, o.macro_p);
    ASSERT_EQ(r.weighted.f1, o.weighted_f1);
    ASSERT_EQ(r.weighted.precision, o.weighted_p);

    double lo = 1.0, hi = 0.0;
    for (const auto& s : r.per_label) {
      lo = std::min(lo, s.score.f1);
      hi = std::max(hi, s.score.f1);
    }
    ASSERT_LE(r.macro.f1, hi + 1e-15);
    ASSERT_GE(r.macro.f1, lo - 1e-15);
  }
}

TEST(SpanReport, ExactMatchAndBoundaryMiss) {
  const std::vector<LabeledSpan> hit{cause(0, 5)};
  auto r = span_exact_match_report(hit, hit);
  EXPECT_EQ(r.per_class[0].score.precision, 1.0);
  EXPECT_EQ(r.per_class[0].score.recall, 1.0);
  EXPECT_EQ(r.per_class[0].score.f1, 1.0);

  const std::vector<LabeledSpan> gold{cause(0, 6)};
  r = span_exact_match_report(hit, gold);
  EXPECT_EQ(r.per_class[0].true_positives, 0u);
  EXPECT_EQ(r.per_class[0].score.precision, 0.0);
  EXPECT_EQ(r.per_class[0].score.recall, 0.0);
}

TEST(SpanReport, ClassAndSentenceMustMatch) {
  const std::vector<LabeledSpan> pred{{"s", SpanClass::Effect, 0, 5}, cause(0, 5, "t")};
  const std::vector<LabeledSpan> gold{cause(0, 5)};
  const auto r = span_exact_match_report(pred, gold);
  EXPECT_EQ(r.micro.precision, 0.0);
  EXPECT_EQ(r.per_class[1].false_positives, 1u);
}

TEST(SpanReport, OneToOneMatching) {
  const std::vector<LabeledSpan> pred{cause(0, 5), cause(0, 5)};
  const std::vector<LabeledSpan> gold{cause(0, 5)};
  const auto r = span_exact_match_report(pred, gold);
  EXPECT_EQ(r.per_class[0].true_positives, 1u);
  EXPECT_EQ(r.per_class[0].false_positives, 1u);
  EXPECT_EQ(r.per_class[0].score.precision, 0.5);
}

TEST(SpanReport, MatchesNaiveScorerOnRandomFixtures) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabeledSpan> pred, gold;
    std::vector<oracle::NaiveSpanItem> npred, ngold;
    auto make = [&](std::vector<LabeledSpan>& out, std::vector<oracle::NaiveSpanItem>& naive) {
      const std::size_t n = rng() % 10;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string id = "s" + std::to_string(rng() % 3);
        const int cls = static_cast<int>(rng() % 2);
        const std::size_t a = rng() % 4, b = a + 1 + rng() % 3;
        out.push_back({id, cls == 0 ? SpanClass::Cause : SpanClass::Effect, a, b});
        naive.push_back({id, cls, a, b});
      }
    };
    make(pred, npred);
    make(gold, ngold);
    const auto r = span_exact_match_report(pred, gold);
    const auto o = oracle::naive_span_counts(npred, ngold);
    std::size_t n_pred[2] = {0, 0}, n_gold[2] = {0, 0};
    for (const auto& p : npred) ++n_pred[p.cls];
    for (const auto& g : ngold) ++n_gold[g.cls];
    for (int c = 0; c < 2; ++c) {
      const auto& s = r.per_class[static_cast<std::size_t>(c)];
      ASSERT_EQ(s.true_positives, o.tp[c]);
      ASSERT_EQ(s.false_positives, o.fp[c]);
      ASSERT_EQ(s.false_negatives, o.fn[c]);
      ASSERT_EQ(s.true_positives + s.false_positives, n_pred[c]);
      ASSERT_EQ(s.true_positives + s.false_negatives, n_gold[c]);
      const auto ref = oracle::naive_prf(o.tp[c], o.fp[c], o.fn[c]);
      ASSERT_EQ(s.score.precision, ref.p);
      ASSERT_EQ(s.score.recall, ref.r);
      ASSERT_EQ(s.score.f1, ref.f1);
    }
    const auto micro = oracle::naive_prf(o.tp[0] + o.tp[1], o.fp[0] + o.fp[1], o.fn[0] + o.fn[1]);
    ASSERT_EQ(r.micro.f1, micro.f1);
  }
}

TEST(SpanReport, LabeledSpansFromPrediction) {
  SentencePrediction p;
  p.sentence_id = "x";
  p.text = "ab cd";
  p.subtokens = {{"ab", 0, 2, Tag::BeginCause, 0.9}, {"cd", 3, 5, Tag::BeginEffect, 0.8}};
  const auto spans = labeled_spans(p, DecodeMode::Strict);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[1], (LabeledSpan{"x", SpanClass::Effect, 3, 5}));
}

TEST(AgreementPairs, Projection) {
  CauseEffectPair c;
  c.sentence_id = "s";
  c.seq_prob_causal = 0.8;
  c.cause = ClaimSide{0.95, {}};
  c.effect = ClaimSide{0.9, {}};
  CauseEffectPair partial = c;
  partial.effect.reset();
  partial.partial = true;
  const std::vector<CauseEffectPair> claims{c, partial};
  const auto rows = agreement_pairs(claims);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].span_class, SpanClass::Cause);
  EXPECT_EQ(rows[0].span_prob, 0.95);
  EXPECT_EQ(rows[1].span_class, SpanClass::Effect);
  EXPECT_EQ(rows[1].seq_prob, 0.8);
  EXPECT_EQ(rows[2].span_class, SpanClass::Cause);
  EXPECT_TRUE(agreement_pairs({}).empty());
}

TEST(BlandAltman, Examples) {
  const std::vector<std::pair<double, double>> constant{{0.7, 0.9}, {0.6, 0.8}};
  auto s = bland_altman(constant);
  EXPECT_NEAR(s.bias, 0.2, 1e-15);
  EXPECT_NEAR(s.sd, 0.0, 1e-15);
  EXPECT_NEAR(s.lower, 0.2, 1e-14);
  EXPECT_NEAR(s.upper, 0.2, 1e-14);

  const std::vector<std::pair<double, double>> identity{{0.1, 0.1}, {0.5, 0.5}, {0.9, 0.9}};
  s = bland_altman(identity);
  EXPECT_EQ(s.bias, 0.0);
  EXPECT_EQ(s.lower, 0.0);
  EXPECT_EQ(s.upper, 0.0);

  const std::vector<std::pair<double, double>> spread{{0.0, 0.1}, {0.0, 0.3}};
  s = bland_altman(spread);
  EXPECT_NEAR(s.bias, 0.2, 1e-15);
  EXPECT_NEAR(s.sd, 0.1414213562373095, 1e-12);
  EXPECT_NEAR(s.lower, -0.0771858582, 1e-10);
  EXPECT_NEAR(s.upper, 0.4771858582, 1e-10);

  const std::vector<std::pair<double, double>> one{{0.1, 0.2}};
  EXPECT_THROW(bland_altman(one), ComputationError);
}

TEST(BlandAltman, SwapNegatesBiasAndMirrorsLimits) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<double, double>> xy, yx;
    for (int i = 0; i < 2 + trial % 20; ++i) {
      const double x = u(rng), y = u(rng);
      xy.emplace_back(x, y);
      yx.emplace_back(y, x);
    }
    const auto a = bland_altman(xy), b = bland_altman(yx);
    EXPECT_NEAR(a.bias, -b.bias, 1e-15);
    EXPECT_NEAR(a.sd, b.sd, 1e-15);
    EXPECT_NEAR(a.lower, -b.upper, 1e-14);
    EXPECT_NEAR(a.upper, -b.lower, 1e-14);
    EXPECT_LE(a.lower, a.bias);
    EXPECT_GE(a.upper, a.bias);
    EXPECT_NEAR(a.upper - a.bias, a.bias - a.lower, 1e-14);
  }
}
