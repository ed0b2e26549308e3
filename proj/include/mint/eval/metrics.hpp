// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace mint::eval {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Window decision: fire when at least `k_run` consecutive frame
/// probabilities reach `threshold`.
struct DecisionRule {
  double threshold = 0.5;
  std::size_t k_run = 7;
  std::size_t window_length = 15;

  void validate() const;
};

int sequence_decision(std::span<const double> frame_probs, const DecisionRule& rule = {});

/// Smallest threshold at which the window fires: the maximum over all
/// k_run-long runs of the minimum inside the run.
double sequence_score(std::span<const double> frame_probs, const DecisionRule& rule = {});

/// Mann-Whitney AUROC with midranks for ties. Throws MetricError unless both
/// classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
  double threshold = 0.0;
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;
};

/// One point per distinct score (descending), starting at (0, 0).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

Confusion confusion(std::span<const int> predicted, std::span<const int> truth);

/// Mean of the positive- and negative-class F1; a class whose F1 has a zero
/// denominator contributes 0.
double macro_f1(std::span<const int> predicted, std::span<const int> truth);
/// (TPR + TNR) / 2; a rate with no support is 0.
double balanced_accuracy(std::span<const int> predicted, std::span<const int> truth);

std::vector<int> threshold_labels(std::span<const double> probs, double threshold);

struct PrPoint {
  double threshold = 0.0;
  double precision = 1.0;  // 1 when nothing is predicted positive
  double recall = 0.0;     // 0 when there are no positives
  std::size_t predicted_positive = 0;
};

/// 99 thresholds 0.01 .. 0.99.
std::vector<double> default_threshold_grid();

/// Window-level precision/recall of sequence_decision at each grid threshold.
std::vector<PrPoint> precision_recall_sweep(const std::vector<std::vector<double>>& window_probs,
                                            std::span<const int> window_labels,
                                            std::span<const double> grid,
                                            std::size_t k_run = 7);

double median(std::vector<double> values);

double mean(std::span<const double> values);
/// Population standard deviation.
double stddev(std::span<const double> values);

}  // namespace mint::eval
