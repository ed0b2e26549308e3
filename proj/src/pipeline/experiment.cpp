// SPDX-License-Identifier: Apache-2.0
#include "mint/pipeline/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mint/data/splits.hpp"
#include "mint/data/windows.hpp"
#include "mint/rvae/model.hpp"

namespace mint::pipeline {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kPoseOnly: return "pose_only";
    case Variant::kEmotionOnly: return "emotion_only";
    case Variant::kMultimodal: return "multimodal";
    case Variant::kMultimodalVae: return "multimodal+vae";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  for (auto v : all_variants()) {
    if (name == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown variant '" + name +
                              "' (expected pose_only, emotion_only, multimodal or multimodal+vae)");
}

const std::array<Variant, 4>& all_variants() {
  static const std::array<Variant, 4> v = {Variant::kPoseOnly, Variant::kEmotionOnly, Variant::kMultimodal,
                                           Variant::kMultimodalVae};
  return v;
}

data::InputMode input_mode(Variant v) {
  switch (v) {
    case Variant::kPoseOnly: return data::InputMode::kPoseOnly;
    case Variant::kEmotionOnly: return data::InputMode::kEmotionOnly;
    default: return data::InputMode::kMultimodal;
  }
}

namespace {

void say(const ExperimentConfig& c, const std::string& msg) {
  if (c.log) c.log(msg);
}

bool has_both_classes(const std::vector<data::SequenceRecord>& records) {
  bool pos = false, neg = false;
  for (const auto& r : records) {
    (r.has_positive() ? pos : neg) = true;
  }
  return pos && neg;
}

std::vector<data::FrameFeature> positive_frames(const std::vector<data::SequenceRecord>& records) {
  std::vector<data::FrameFeature> out;
  for (const auto& r : records)
    for (const auto& f : r.frames)
      if (f.label == 1) out.push_back(f);
  return out;
}

/// Hands out the positive windows of a fixed pool in order, standardized.
data::WindowGenerator pooled_generator(const std::vector<data::WindowSample>& pool,
                                       const data::Standardizer& standardizer, std::size_t length) {
  auto positives = std::make_shared<std::vector<data::WindowSample>>();
  for (const auto& w : pool) {
    if (w.length() != length) {
      throw std::invalid_argument("synthetic window '" + w.record_id + "' has length " +
                                  std::to_string(w.length()) + ", expected " + std::to_string(length));
    }
    if (w.window_label != 1) continue;
    std::vector<data::FrameFeature> frames;
    for (const auto& f : w.frames) frames.push_back(standardizer.apply(f));
    positives->push_back(data::make_window(std::move(frames), w.record_id, w.start));
  }
  auto next = std::make_shared<std::size_t>(0);
  return [positives, next]() {
    if (*next >= positives->size()) {
      throw std::runtime_error("synthetic pool holds only " + std::to_string(positives->size()) +
                               " positive windows, too few to reach the target fraction");
    }
    return (*positives)[(*next)++];
  };
}

}  // namespace

RunOutcome train_and_evaluate(const std::vector<data::SequenceRecord>& train,
                              const std::vector<data::SequenceRecord>& test, Variant variant,
                              const ExperimentConfig& config, std::uint64_t seed) {
  const std::size_t t = config.detector.window_length;
  nn::Rng rng(seed);
  const auto standardizer = data::fit_standardizer(train);
  const auto train_s = standardizer.apply(train);

  std::vector<data::SequenceRecord> fit_records = train_s, stop_records;
  if (config.early_stopping_folds >= 2 && train_s.size() >= config.early_stopping_folds &&
      has_both_classes(train_s)) {
    const auto inner = data::stratified_kfold(train_s, config.early_stopping_folds, seed ^ 0x5eedULL);
    fit_records = data::select(train_s, inner.front().train);
    stop_records = data::select(train_s, inner.front().validation);
  }
  auto train_windows = data::window_sequences(fit_records, t, config.train_stride).windows;
  const auto stop_windows = data::window_sequences(stop_records, t, config.eval_stride).windows;
  if (train_windows.empty()) throw std::invalid_argument("no training sequence spans a full window");

  RunOutcome out;
  out.train_windows = train_windows.size();
  if (variant == Variant::kMultimodalVae) {
    data::WindowGenerator generator;
    if (!config.synthetic_pool.empty()) {
      generator = pooled_generator(config.synthetic_pool, standardizer, t);
    } else {
      say(config, "training VAE on " + std::to_string(train_windows.size()) + " windows");
      auto vae_rng = rng.fork(1);
      auto vae = rvae::train_rvae(train_windows, config.vae, vae_rng);
      out.vae_history = std::move(vae.history);
      auto model = std::make_shared<const rvae::RvaeModel>(std::move(vae.model));
      auto pool = positive_frames(fit_records);
      if (pool.empty()) throw std::invalid_argument("augmentation needs positive training frames to seed generation");
      generator = rvae::positive_window_generator(model, std::move(pool), seed + 17, t);
    }
    const auto before = train_windows.size();
    train_windows = data::rebalance(std::move(train_windows), generator, config.target_positive_fraction);
    out.synthetic_windows = train_windows.size() - before;
    say(config, "appended " + std::to_string(out.synthetic_windows) + " synthetic positive windows");
  }

  auto det_cfg = config.detector;
  det_cfg.input_mode = input_mode(variant);
  if (config.reference_hidden) det_cfg.hidden = detect::reference_hidden_size(det_cfg.backbone, det_cfg.input_mode);
  auto det_rng = rng.fork(2);
  auto trained = detect::train_detector(det_cfg, train_windows, stop_windows, det_rng);
  say(config, std::string("trained ") + detect::to_string(det_cfg.backbone) + " (" + to_string(variant) +
                  ") for " + std::to_string(trained.history.size()) + " epochs");
  out.detector_history = std::move(trained.history);
  out.standardizer = standardizer;
  out.detector = std::make_shared<const detect::Detector>(std::move(trained.detector));

  for (const auto& r : standardizer.apply(test)) {
    if (r.frames.size() < t) continue;
    out.record_probs.push_back(detect::predict_sequence(*out.detector, r, config.eval_stride));
    out.test_records.push_back(r);
  }
  out.evaluation = eval::evaluate_probabilities(out.test_records, out.record_probs, config.rule, config.eval_stride);
  return out;
}

VariantReport cross_validate(const std::vector<data::SequenceRecord>& records, Variant variant,
                             const ExperimentConfig& config) {
  const auto folds = data::stratified_kfold(records, config.folds, config.seed);
  VariantReport vr{to_string(variant), {}, {}};
  std::vector<std::string> names;
  std::vector<eval::MetricSet> metrics;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const std::string name = "fold" + std::to_string(i + 1);
    say(config, std::string(to_string(variant)) + " " + name);
    try {
      vr.runs.push_back(train_and_evaluate(data::select(records, folds[i].train),
                                           data::select(records, folds[i].validation), variant, config,
                                           config.seed + i));
    } catch (const eval::MetricError& e) {
      throw eval::MetricError(name + ": " + e.what());
    }
    names.push_back(name);
    metrics.push_back(vr.runs.back().evaluation.metrics);
  }
  vr.report = eval::aggregate(std::move(names), std::move(metrics));
  return vr;
}

VariantReport heldout_env3(const std::vector<data::SequenceRecord>& env12,
                           const std::vector<data::SequenceRecord>& env3, Variant variant,
                           const ExperimentConfig& config) {
  for (const auto& r : env3) {
    if (r.env != data::Environment::kEnv3) {
      throw std::invalid_argument("held-out set contains non-Env3 record '" + r.id + "'");
    }
  }
  const auto halves = data::two_split_heldout(env12, config.seed);
  VariantReport vr{to_string(variant), {}, {}};
  std::vector<std::string> names;
  std::vector<eval::MetricSet> metrics;
  for (std::size_t h = 0; h < 2; ++h) {
    const std::string name = "split" + std::to_string(h + 1);
    say(config, std::string(to_string(variant)) + " " + name);
    try {
      vr.runs.push_back(train_and_evaluate(data::select(env12, halves[h]), env3, variant, config, config.seed + h));
    } catch (const eval::MetricError& e) {
      throw eval::MetricError(name + ": " + e.what());
    }
    names.push_back(name);
    metrics.push_back(vr.runs.back().evaluation.metrics);
  }
  vr.report = eval::aggregate(std::move(names), std::move(metrics));
  return vr;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

void write_outputs(const std::string& dir, const std::vector<VariantReport>& reports,
                   const std::string& title) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto report = open_out(fs::path(dir) / "report.txt");
  for (const auto& vr : reports) write_report(report, title + " " + vr.name, vr.report);

  auto roc_frame = open_out(fs::path(dir) / "roc_frame.csv");
  auto roc_seq = open_out(fs::path(dir) / "roc_seq.csv");
  auto pr = open_out(fs::path(dir) / "pr_sweep.csv");
  auto traj = open_out(fs::path(dir) / "onset_traj.csv");
  roc_frame << "variant,";
  roc_seq << "variant,";
  pr << "variant,";
  traj << "variant,";
  bool first = true;
  for (const auto& vr : reports) {
    eval::Evaluation pooled;
    std::vector<data::SequenceRecord> records;
    std::vector<std::vector<double>> probs;
    for (const auto& run : vr.runs) {
      const auto& e = run.evaluation;
      pooled.frame_scores.insert(pooled.frame_scores.end(), e.frame_scores.begin(), e.frame_scores.end());
      pooled.frame_labels.insert(pooled.frame_labels.end(), e.frame_labels.begin(), e.frame_labels.end());
      pooled.sequence_scores.insert(pooled.sequence_scores.end(), e.sequence_scores.begin(), e.sequence_scores.end());
      pooled.sequence_labels.insert(pooled.sequence_labels.end(), e.sequence_labels.begin(), e.sequence_labels.end());
      pooled.window_probs.insert(pooled.window_probs.end(), e.window_probs.begin(), e.window_probs.end());
      records.insert(records.end(), run.test_records.begin(), run.test_records.end());
      probs.insert(probs.end(), run.record_probs.begin(), run.record_probs.end());
    }
    const std::string& tag = vr.name;
    auto emit = [&](std::ofstream& out, auto writer) {
      std::ostringstream body;
      writer(body);
      std::istringstream lines(body.str());
      std::string line;
      std::getline(lines, line);
      if (first) out << line << '\n';
      while (std::getline(lines, line)) out << tag << ',' << line << '\n';
    };
    emit(roc_frame, [&](std::ostream& o) { eval::write_roc_csv(o, eval::roc_curve(pooled.frame_scores, pooled.frame_labels)); });
    emit(roc_seq, [&](std::ostream& o) { eval::write_roc_csv(o, eval::roc_curve(pooled.sequence_scores, pooled.sequence_labels)); });
    emit(pr, [&](std::ostream& o) {
      eval::write_pr_csv(o, eval::precision_recall_sweep(pooled.window_probs, pooled.sequence_labels,
                                                         eval::default_threshold_grid()));
    });
    emit(traj, [&](std::ostream& o) { eval::write_trajectory_csv(o, eval::onset_aligned_trajectories(records, probs)); });
    first = false;
  }
}

}  // namespace mint::pipeline
