// SPDX-License-Identifier: Apache-2.0
#include "mint/eval/report.hpp"

#include <map>
#include <ostream>

#include "mint/data/windows.hpp"

namespace mint::eval {

const std::array<const char*, MetricSet::kCount>& MetricSet::names() {
  static const std::array<const char*, kCount> n = {
      "frame_auroc",    "frame_macro_f1",    "frame_balanced_accuracy",
      "sequence_auroc", "sequence_macro_f1", "sequence_balanced_accuracy"};
  return n;
}

std::array<double, MetricSet::kCount> MetricSet::values() const {
  return {frame_auroc,    frame_macro_f1,    frame_balanced_accuracy,
          sequence_auroc, sequence_macro_f1, sequence_balanced_accuracy};
}

MetricSet MetricSet::from_values(const std::array<double, kCount>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

Evaluation evaluate_probabilities(const std::vector<data::SequenceRecord>& records,
                                  const std::vector<std::vector<double>>& record_probs,
                                  const DecisionRule& rule, std::size_t stride,
                                  double frame_threshold) {
  if (records.size() != record_probs.size()) {
    throw MetricError("evaluate_probabilities: " + std::to_string(records.size()) + " records but " +
                      std::to_string(record_probs.size()) + " probability tracks");
  }
  if (stride == 0) throw MetricError("evaluate_probabilities: stride must be > 0");
  rule.validate();
  Evaluation ev;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& frames = records[r].frames;
    const auto& probs = record_probs[r];
    if (probs.size() != frames.size()) {
      throw MetricError("record '" + records[r].id + "': probability track length mismatch");
    }
    for (std::size_t t = 0; t < frames.size(); ++t) {
      ev.frame_scores.push_back(probs[t]);
      ev.frame_labels.push_back(frames[t].label);
    }
    const std::size_t len = rule.window_length;
    for (std::size_t s = 0; s + len <= frames.size(); s += stride) {
      std::vector<double> w(probs.begin() + static_cast<std::ptrdiff_t>(s),
                            probs.begin() + static_cast<std::ptrdiff_t>(s + len));
      ev.sequence_scores.push_back(sequence_score(w, rule));
      ev.sequence_labels.push_back(data::window_label_from_frames(
          std::span<const data::FrameFeature>(frames).subspan(s, len), data::kMinPositiveFrames));
      ev.window_probs.push_back(std::move(w));
    }
  }
  if (ev.sequence_scores.empty()) throw MetricError("evaluate_probabilities: no record spans a full window");
  auto& m = ev.metrics;
  m.frame_auroc = roc_auc(ev.frame_scores, ev.frame_labels);
  const auto frame_pred = threshold_labels(ev.frame_scores, frame_threshold);
  m.frame_macro_f1 = macro_f1(frame_pred, ev.frame_labels);
  m.frame_balanced_accuracy = balanced_accuracy(frame_pred, ev.frame_labels);
  m.sequence_auroc = roc_auc(ev.sequence_scores, ev.sequence_labels);
  const auto seq_pred = threshold_labels(ev.sequence_scores, rule.threshold);
  m.sequence_macro_f1 = macro_f1(seq_pred, ev.sequence_labels);
  m.sequence_balanced_accuracy = balanced_accuracy(seq_pred, ev.sequence_labels);
  return ev;
}

EvalReport aggregate(std::vector<std::string> fold_names, std::vector<MetricSet> folds) {
  if (folds.empty()) throw MetricError("aggregate: no folds");
  if (fold_names.size() != folds.size()) throw MetricError("aggregate: fold name count mismatch");
  EvalReport r{std::move(fold_names), std::move(folds), {}, {}};
  std::array<double, MetricSet::kCount> mu{}, sd{};
  for (std::size_t k = 0; k < MetricSet::kCount; ++k) {
    std::vector<double> col;
    for (const auto& f : r.folds) col.push_back(f.values()[k]);
    mu[k] = mean(col);
    sd[k] = stddev(col);
  }
  r.mean = MetricSet::from_values(mu);
  r.stddev = MetricSet::from_values(sd);
  return r;
}

void write_report(std::ostream& out, const std::string& title, const EvalReport& report) {
  const auto old = out.precision(17);
  out << "# " << title << '\n';
  out << "folds = " << report.folds.size() << '\n';
  const auto& names = MetricSet::names();
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto v = report.folds[f].values();
    for (std::size_t k = 0; k < names.size(); ++k) {
      out << report.fold_names[f] << '.' << names[k] << " = " << v[k] << '\n';
    }
  }
  const auto mu = report.mean.values(), sd = report.stddev.values();
  for (std::size_t k = 0; k < names.size(); ++k) {
    out << "mean." << names[k] << " = " << mu[k] << '\n';
    out << "std." << names[k] << " = " << sd[k] << '\n';
  }
  out.precision(old);
}

std::vector<TrajectoryPoint> onset_aligned_trajectories(
    const std::vector<data::SequenceRecord>& records,
    const std::vector<std::vector<double>>& record_probs, int before, int after) {
  if (records.size() != record_probs.size()) throw MetricError("onset trajectories: size mismatch");
  if (before < 0 || after < 0) throw MetricError("onset trajectories: negative window bound");
  std::map<int, std::vector<double>> by_offset;
  std::size_t with_onset = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto onset = records[r].onset_index();
    if (!onset) continue;
    ++with_onset;
    const auto& p = record_probs[r];
    if (p.size() != records[r].frames.size()) {
      throw MetricError("record '" + records[r].id + "': probability track length mismatch");
    }
    for (int d = -before; d <= after; ++d) {
      const auto t = static_cast<std::ptrdiff_t>(*onset) + d;
      if (t >= 0 && t < static_cast<std::ptrdiff_t>(p.size())) by_offset[d].push_back(p[static_cast<std::size_t>(t)]);
    }
  }
  if (with_onset == 0) throw MetricError("onset trajectories: no record has an onset");
  std::vector<TrajectoryPoint> out;
  for (auto& [d, values] : by_offset) out.push_back({d, median(values), values.size()});
  return out;
}

void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& curve) {
  const auto old = out.precision(17);
  out << "threshold,false_positive_rate,true_positive_rate\n";
  for (const auto& p : curve) {
    out << p.threshold << ',' << p.false_positive_rate << ',' << p.true_positive_rate << '\n';
  }
  out.precision(old);
}

void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& curve) {
  const auto old = out.precision(17);
  out << "threshold,precision,recall,predicted_positive\n";
  for (const auto& p : curve) {
    out << p.threshold << ',' << p.precision << ',' << p.recall << ',' << p.predicted_positive << '\n';
  }
  out.precision(old);
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& points) {
  const auto old = out.precision(17);
  out << "relative_time,median_probability,count\n";
  for (const auto& p : points) out << p.relative_time << ',' << p.median << ',' << p.count << '\n';
  out.precision(old);
}

}  // namespace mint::eval
