// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "mint/data/frame.hpp"
#include "mint/eval/metrics.hpp"

namespace mint::eval {

struct MetricSet {
  double frame_auroc = 0.0;
  double frame_macro_f1 = 0.0;
  double frame_balanced_accuracy = 0.0;
  double sequence_auroc = 0.0;
  double sequence_macro_f1 = 0.0;
  double sequence_balanced_accuracy = 0.0;

  static constexpr std::size_t kCount = 6;
  static const std::array<const char*, kCount>& names();
  std::array<double, kCount> values() const;
  static MetricSet from_values(const std::array<double, kCount>& v);
};

/// Everything needed to score one held-out set and draw its curves.
struct Evaluation {
  MetricSet metrics;
  std::vector<double> frame_scores;
  std::vector<int> frame_labels;
  std::vector<double> sequence_scores;
  std::vector<int> sequence_labels;
  std::vector<std::vector<double>> window_probs;
};

/// Scores per-frame probabilities of whole records. Frame metrics pool all
/// frames (F1 and balanced accuracy at `frame_threshold`); sequence metrics
/// use windows of rule.window_length at `stride`, labeled by the >= 7
/// positive frames rule and decided by the consecutive-run rule.
Evaluation evaluate_probabilities(const std::vector<data::SequenceRecord>& records,
                                  const std::vector<std::vector<double>>& record_probs,
                                  const DecisionRule& rule = {}, std::size_t stride = 5,
                                  double frame_threshold = 0.5);

struct EvalReport {
  std::vector<std::string> fold_names;
  std::vector<MetricSet> folds;
  MetricSet mean;
  MetricSet stddev;  // population, across folds
};

EvalReport aggregate(std::vector<std::string> fold_names, std::vector<MetricSet> folds);

/// `key = value` lines: per-fold metrics then mean and std.
void write_report(std::ostream& out, const std::string& title, const EvalReport& report);

struct TrajectoryPoint {
  int relative_time = 0;
  double median = 0.0;
  std::size_t count = 0;
};

/// Median probability across records at each frame offset from the onset,
/// for offsets in [-before, after]. Offsets no record covers are omitted.
std::vector<TrajectoryPoint> onset_aligned_trajectories(
    const std::vector<data::SequenceRecord>& records,
    const std::vector<std::vector<double>>& record_probs, int before = 30, int after = 30);

// CSV tables. Headers:
//   roc:    threshold,false_positive_rate,true_positive_rate
//   pr:     threshold,precision,recall,predicted_positive
//   onset:  relative_time,median_probability,count
void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& curve);
void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& curve);
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& points);

}  // namespace mint::eval
