// SPDX-License-Identifier: Apache-2.0
#include "mint/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mint::eval {

void DecisionRule::validate() const {
  if (k_run < 1 || k_run > window_length) {
    throw MetricError("decision rule requires 1 <= k_run <= window length, got k_run=" +
                      std::to_string(k_run) + ", T=" + std::to_string(window_length));
  }
  if (!(threshold > 0.0 && threshold < 1.0)) throw MetricError("decision threshold must lie in (0, 1)");
}

namespace {

void check_window(std::span<const double> p, const DecisionRule& rule) {
  if (p.size() != rule.window_length) {
    throw MetricError("expected " + std::to_string(rule.window_length) + " frame probabilities, got " +
                      std::to_string(p.size()));
  }
  if (rule.k_run < 1 || rule.k_run > rule.window_length) rule.validate();
}

void check_pair(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw MetricError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " +
                      std::to_string(b));
  }
}

}  // namespace

int sequence_decision(std::span<const double> p, const DecisionRule& rule) {
  check_window(p, rule);
  std::size_t run = 0;
  for (double v : p) {
    run = v >= rule.threshold ? run + 1 : 0;
    if (run >= rule.k_run) return 1;
  }
  return 0;
}

double sequence_score(std::span<const double> p, const DecisionRule& rule) {
  check_window(p, rule);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + rule.k_run <= p.size(); ++s) {
    best = std::max(best, *std::min_element(p.begin() + static_cast<std::ptrdiff_t>(s),
                                            p.begin() + static_cast<std::ptrdiff_t>(s + rule.k_run)));
  }
  return best;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_pair(scores.size(), labels.size(), "roc_auc");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw MetricError("roc_auc: both classes must be present");
  const double np = static_cast<double>(positives), nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  check_pair(scores.size(), labels.size(), "roc_curve");
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw MetricError("roc_curve: both classes must be present");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  std::vector<RocPoint> curve{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    curve.push_back({s, static_cast<double>(fp) / static_cast<double>(neg),
                     static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return curve;
}

Confusion confusion(std::span<const int> predicted, std::span<const int> truth) {
  check_pair(predicted.size(), truth.size(), "confusion");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == 1, t = truth[i] == 1;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) { return ratio(2 * tp, 2 * tp + fp + fn); }

}  // namespace

double macro_f1(std::span<const int> predicted, std::span<const int> truth) {
  const auto c = confusion(predicted, truth);
  return 0.5 * (f1(c.tp, c.fp, c.fn) + f1(c.tn, c.fn, c.fp));
}

double balanced_accuracy(std::span<const int> predicted, std::span<const int> truth) {
  const auto c = confusion(predicted, truth);
  return 0.5 * (ratio(c.tp, c.tp + c.fn) + ratio(c.tn, c.tn + c.fp));
}

std::vector<int> threshold_labels(std::span<const double> probs, double threshold) {
  std::vector<int> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] >= threshold ? 1 : 0;
  return out;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid(99);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i + 1) / 100.0;
  return grid;
}

std::vector<PrPoint> precision_recall_sweep(const std::vector<std::vector<double>>& window_probs,
                                            std::span<const int> window_labels,
                                            std::span<const double> grid, std::size_t k_run) {
  check_pair(window_probs.size(), window_labels.size(), "precision_recall_sweep");
  // The minimal firing threshold per window decides every grid point at once.
  std::vector<double> fire_at(window_probs.size());
  for (std::size_t w = 0; w < window_probs.size(); ++w) {
    DecisionRule rule;
    rule.k_run = k_run;
    rule.window_length = window_probs[w].size();
    fire_at[w] = sequence_score(window_probs[w], rule);
  }
  std::vector<PrPoint> out;
  out.reserve(grid.size());
  for (double tau : grid) {
    if (!(tau > 0.0 && tau < 1.0)) throw MetricError("threshold grid values must lie in (0, 1)");
    std::size_t tp = 0, fp = 0, pos = 0;
    for (std::size_t w = 0; w < fire_at.size(); ++w) {
      const bool fired = fire_at[w] >= tau;
      const bool truth = window_labels[w] == 1;
      pos += truth;
      tp += fired && truth;
      fp += fired && !truth;
    }
    out.push_back({tau, tp + fp == 0 ? 1.0 : ratio(tp, tp + fp), ratio(tp, pos), tp + fp});
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw MetricError("median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean(std::span<const double> v) {
  if (v.empty()) throw MetricError("mean of an empty set");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  const double m = mean(v);
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(v.size()));
}

}  // namespace mint::eval
