// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "mint/eval/metrics.hpp"
#include "mint/numerics/rng.hpp"

namespace mint::eval {
namespace {

std::vector<double> window_with_run(std::size_t start, std::size_t len, double hi = 0.9, double lo = 0.1) {
  std::vector<double> p(15, lo);
  for (std::size_t i = start; i < start + len; ++i) p[i] = hi;
  return p;
}

double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

TEST(SequenceDecision, RunRule) {
  EXPECT_EQ(sequence_decision(window_with_run(4, 7)), 1);
  EXPECT_EQ(sequence_decision(window_with_run(4, 6)), 0);
  std::vector<double> alt(15);
  for (std::size_t i = 0; i < 15; ++i) alt[i] = i % 2 ? 0.1 : 0.9;
  EXPECT_EQ(sequence_decision(alt), 0);
  EXPECT_THROW(sequence_decision(std::vector<double>(14, 0.9)), MetricError);
}

TEST(SequenceScore, Examples) {
  EXPECT_DOUBLE_EQ(sequence_score(std::vector<double>(15, 0.8)), 0.8);
  std::vector<double> spike(15, 0.0);
  spike[6] = 1.0;
  EXPECT_DOUBLE_EQ(sequence_score(spike), 0.0);
}

TEST(SequenceScore, MatchesDecisionOnRandomWindows) {
  nn::Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> p(15);
    for (auto& v : p) v = rng.uniform();
    DecisionRule rule;
    rule.threshold = rng.uniform(0.01, 0.99);
    EXPECT_EQ(sequence_score(p, rule) >= rule.threshold, sequence_decision(p, rule) == 1);
  }
}

TEST(SequenceScore, MonotoneInEachFrame) {
  nn::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> p(15);
    for (auto& v : p) v = rng.uniform();
    const double before = sequence_score(p);
    p[rng.index(15)] += rng.uniform();
    EXPECT_GE(sequence_score(p), before);
  }
}

TEST(RocAuc, Examples) {
  const std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
  EXPECT_DOUBLE_EQ(roc_auc(s, std::vector<int>{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(s, std::vector<int>{1, 0, 1, 0}), 0.75);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>(6, 0.3), std::vector<int>{1, 0, 1, 0, 0, 1}), 0.5);
  EXPECT_THROW(roc_auc(s, std::vector<int>{1, 1, 1, 1}), MetricError);
}

TEST(RocAuc, PairwiseOracleWithTies) {
  nn::Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.index(199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.index(12)) / 11.0;  // coarse grid forces ties
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(roc_auc(s, y), pairwise_auc(s, y), 1e-12);
    std::vector<double> transformed(n);
    for (std::size_t i = 0; i < n; ++i) transformed[i] = std::exp(3.0 * s[i]) - 7.0;
    EXPECT_EQ(roc_auc(transformed, y), roc_auc(s, y));
  }
}

TEST(RocCurve, EndpointsAndMonotone) {
  const std::vector<double> s = {0.9, 0.8, 0.8, 0.3, 0.1};
  const std::vector<int> y = {1, 0, 1, 1, 0};
  const auto c = roc_curve(s, y);
  EXPECT_EQ(c.front().false_positive_rate, 0.0);
  EXPECT_EQ(c.back().true_positive_rate, 1.0);
  EXPECT_EQ(c.back().false_positive_rate, 1.0);
  ASSERT_EQ(c.size(), 5u);  // start + 4 distinct scores
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_GE(c[i].true_positive_rate, c[i - 1].true_positive_rate);
    EXPECT_GE(c[i].false_positive_rate, c[i - 1].false_positive_rate);
  }
}

TEST(Classification, PerfectAndBalanced) {
  const std::vector<int> t = {1, 0, 1, 0, 0};
  EXPECT_DOUBLE_EQ(macro_f1(t, t), 1.0);
  EXPECT_DOUBLE_EQ(balanced_accuracy(t, t), 1.0);
  // TPR 1, TNR 0.5
  EXPECT_DOUBLE_EQ(balanced_accuracy(std::vector<int>{1, 1, 1, 0}, std::vector<int>{1, 1, 0, 0}), 0.75);
  // No positives anywhere: positive F1 has a zero denominator.
  EXPECT_DOUBLE_EQ(macro_f1(std::vector<int>{0, 0}, std::vector<int>{0, 0}), 0.5);
}

TEST(Classification, ConfusionOracle) {
  nn::Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(60);
    std::vector<int> p(n), t(n);
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.bernoulli(0.5);
      t[i] = rng.bernoulli(0.3);
      (p[i] ? (t[i] ? tp : fp) : (t[i] ? fn : tn)) += 1;
    }
    const double f1p = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    const double f1n = 2 * tn + fn + fp > 0 ? 2 * tn / (2 * tn + fn + fp) : 0.0;
    const double tpr = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double tnr = tn + fp > 0 ? tn / (tn + fp) : 0.0;
    EXPECT_EQ(macro_f1(p, t), (f1p + f1n) / 2);
    EXPECT_EQ(balanced_accuracy(p, t), (tpr + tnr) / 2);
  }
}

TEST(PrSweep, BoundariesAndMonotonicity) {
  nn::Rng rng(5);
  std::vector<std::vector<double>> windows;
  std::vector<int> labels;
  for (int i = 0; i < 80; ++i) {
    std::vector<double> p(15);
    for (auto& v : p) v = 0.02 + 0.9 * rng.uniform();
    windows.push_back(p);
    labels.push_back(rng.bernoulli(0.4));
  }
  labels[0] = 1;
  const auto grid = default_threshold_grid();
  ASSERT_EQ(grid.size(), 99u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.01);
  EXPECT_DOUBLE_EQ(grid.back(), 0.99);
  const auto curve = precision_recall_sweep(windows, labels, grid);
  EXPECT_EQ(curve.front().recall, 1.0);
  EXPECT_EQ(curve.back().predicted_positive, 0u);
  EXPECT_EQ(curve.back().precision, 1.0);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LE(curve[i].recall, curve[i - 1].recall);
    EXPECT_LE(curve[i].predicted_positive, curve[i - 1].predicted_positive);
  }
  // Each point agrees with direct decisions.
  for (std::size_t g = 0; g < grid.size(); g += 7) {
    DecisionRule rule;
    rule.threshold = grid[g];
    std::size_t fired = 0;
    for (const auto& w : windows) fired += sequence_decision(w, rule);
    EXPECT_EQ(curve[g].predicted_positive, fired);
  }
}

TEST(Stats, MedianMeanStd) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(mean(v), 2.5);
  EXPECT_DOUBLE_EQ(stddev(v), std::sqrt(1.25));
  EXPECT_THROW(median({}), MetricError);
}

}  // namespace
}  // namespace mint::eval
