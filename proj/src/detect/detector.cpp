// SPDX-License-Identifier: Apache-2.0
#include "mint/detect/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "mint/eval/metrics.hpp"
#include "mint/numerics/checkpoint.hpp"

namespace mint::detect {

const char* to_string(Backbone b) {
  switch (b) {
    case Backbone::kGru: return "gru";
    case Backbone::kLstm: return "lstm";
    case Backbone::kTransformer: return "transformer";
  }
  return "?";
}

Backbone backbone_from_string(const std::string& name) {
  if (name == "gru") return Backbone::kGru;
  if (name == "lstm") return Backbone::kLstm;
  if (name == "transformer") return Backbone::kTransformer;
  throw std::invalid_argument("unknown backbone '" + name + "' (expected gru, lstm or transformer)");
}

std::size_t reference_hidden_size(Backbone backbone, InputMode mode) {
  switch (mode) {
    case InputMode::kPoseOnly: return 256;
    case InputMode::kEmotionOnly: return 16;
    case InputMode::kMultimodal: return backbone == Backbone::kTransformer ? 256 : 96;
  }
  return 0;
}

void DetectorConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("DetectorConfig: " + what);
  };
  require(hidden > 0, "hidden must be > 0");
  require(window_length >= 1, "window_length must be >= 1");
  require(epochs > 0 && batch_size > 0, "epochs and batch_size must be > 0");
  require(learning_rate > 0 && weight_decay >= 0, "invalid optimizer settings");
  if (backbone == Backbone::kTransformer) {
    require(heads > 0 && hidden % heads == 0,
            "heads (" + std::to_string(heads) + ") must divide hidden (" + std::to_string(hidden) + ")");
  }
}

void to_json(nlohmann::json& j, const DetectorConfig& c) {
  j = {{"backbone", to_string(c.backbone)},
       {"input_mode", data::to_string(c.input_mode)},
       {"hidden", c.hidden},
       {"heads", c.heads},
       {"window_length", c.window_length},
       {"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"weight_decay", c.weight_decay},
       {"patience", c.patience}};
}

void from_json(const nlohmann::json& j, DetectorConfig& c) {
  c.backbone = backbone_from_string(j.at("backbone").get<std::string>());
  c.input_mode = data::input_mode_from_string(j.at("input_mode").get<std::string>());
  j.at("hidden").get_to(c.hidden);
  j.at("heads").get_to(c.heads);
  j.at("window_length").get_to(c.window_length);
  j.at("epochs").get_to(c.epochs);
  j.at("batch_size").get_to(c.batch_size);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("weight_decay").get_to(c.weight_decay);
  j.at("patience").get_to(c.patience);
}

Detector::Detector(const DetectorConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const std::size_t in = data::input_width(config_.input_mode);
  const std::size_t h = config_.hidden;
  switch (config_.backbone) {
    case Backbone::kGru: gru_ = nn::GruCell(in, h, rng); break;
    case Backbone::kLstm: lstm_ = nn::LstmCell(in, h, rng); break;
    case Backbone::kTransformer:
      input_projection_ = nn::Linear(in, h, rng);
      positional_ = nn::uniform_param({config_.window_length, h}, 0.02, rng);
      block_ = nn::TransformerEncoderBlock(h, config_.heads, 4 * h, rng);
      head_norm_ = nn::LayerNorm(h);
      break;
  }
  head_ = nn::Linear(h, 1, rng);
}

Tensor Detector::head_weight() const { return head_.weight(); }
Tensor Detector::head_bias() const { return head_.bias(); }

Tensor Detector::logits(const Tensor& features, std::size_t batch) const {
  const std::size_t width = data::input_width(config_.input_mode);
  if (features.rank() != 2 || features.cols() != width || batch == 0 ||
      features.rows() != batch * config_.window_length) {
    throw nn::ShapeError(std::string("detector (") + data::to_string(config_.input_mode) +
                         ") expects time-major [" + std::to_string(config_.window_length) + " * " +
                         std::to_string(batch) + ", " + std::to_string(width) + "] features, got " +
                         nn::to_string(features.shape()));
  }
  if (config_.backbone == Backbone::kTransformer) return transformer_logits(features, batch);

  const std::size_t steps = config_.window_length;
  std::vector<Tensor> states;
  states.reserve(steps);
  Tensor h = Tensor::zeros({batch, config_.hidden});
  if (config_.backbone == Backbone::kGru) {
    for (const auto& g : nn::split_time_major(gru_.project_input(features), steps)) {
      h = gru_.step(g, h);
      states.push_back(h);
    }
  } else {
    Tensor c = Tensor::zeros({batch, config_.hidden});
    for (const auto& g : nn::split_time_major(lstm_.project_input(features), steps)) {
      std::tie(h, c) = lstm_.step(g, h, c);
      states.push_back(h);
    }
  }
  return head_.forward(nn::concat(states, 0));
}

Tensor Detector::transformer_logits(const Tensor& features, std::size_t batch) const {
  const std::size_t t = config_.window_length, h = config_.hidden;
  const Tensor projected = input_projection_.forward(features);  // time-major [T*B, H]
  const Tensor batch_major =
      nn::reshape(nn::permute(nn::reshape(projected, {t, batch, h}), {1, 0, 2}), {batch * t, h});
  const Tensor positions = nn::concat(std::vector<Tensor>(batch, positional_), 0);
  const Tensor encoded = block_.forward(nn::add(batch_major, positions), batch, t);
  const Tensor logit = head_.forward(head_norm_.forward(encoded));  // batch-major [B*T, 1]
  return nn::reshape(nn::permute(nn::reshape(logit, {batch, t, 1}), {1, 0, 2}), {t * batch, 1});
}

nn::ParamList Detector::parameters() const {
  nn::ParamList out;
  switch (config_.backbone) {
    case Backbone::kGru: gru_.collect("gru", out); break;
    case Backbone::kLstm: lstm_.collect("lstm", out); break;
    case Backbone::kTransformer:
      input_projection_.collect("input", out);
      out.push_back({"positional", positional_});
      block_.collect("block", out);
      head_norm_.collect("head_norm", out);
      break;
  }
  head_.collect("head", out);
  return out;
}

std::vector<std::vector<double>> predict_windows(const Detector& detector,
                                                 std::span<const data::WindowSample* const> windows) {
  std::vector<std::vector<double>> out(windows.size());
  constexpr std::size_t kChunk = 256;
  for (std::size_t begin = 0; begin < windows.size(); begin += kChunk) {
    const auto chunk = windows.subspan(begin, std::min(kChunk, windows.size() - begin));
    const auto features = data::pack_features_time_major(chunk, detector.config().input_mode);
    const auto logits = detector.logits(features, chunk.size());
    const auto v = logits.values();
    const std::size_t t = detector.config().window_length, b = chunk.size();
    for (std::size_t w = 0; w < b; ++w) {
      auto& probs = out[begin + w];
      probs.resize(t);
      for (std::size_t s = 0; s < t; ++s) probs[s] = 1.0 / (1.0 + std::exp(-v[s * b + w]));
    }
  }
  return out;
}

std::vector<std::vector<double>> predict_windows(const Detector& detector,
                                                 const std::vector<data::WindowSample>& windows) {
  const auto ptrs = data::pointers(windows);
  return predict_windows(detector, std::span<const data::WindowSample* const>(ptrs));
}

namespace {

struct FrameScores {
  std::vector<double> scores;
  std::vector<int> labels;
};

FrameScores flatten_frames(const std::vector<std::vector<double>>& probs,
                           const std::vector<data::WindowSample>& windows) {
  FrameScores fs;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    for (std::size_t t = 0; t < windows[w].length(); ++t) {
      fs.scores.push_back(probs[w][t]);
      fs.labels.push_back(windows[w].frames[t].label);
    }
  }
  return fs;
}

bool both_classes(const std::vector<int>& labels) {
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  return pos > 0 && pos < static_cast<std::ptrdiff_t>(labels.size());
}

double mean_bce(const FrameScores& fs) {
  double total = 0.0;
  for (std::size_t i = 0; i < fs.scores.size(); ++i) {
    const double p = std::clamp(fs.scores[i], 1e-12, 1.0 - 1e-12);
    total -= fs.labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return fs.scores.empty() ? 0.0 : total / static_cast<double>(fs.scores.size());
}

void check_lengths(const std::vector<data::WindowSample>& windows, std::size_t length, const char* what) {
  for (const auto& w : windows) {
    if (w.length() != length) {
      throw std::invalid_argument(std::string(what) + " window of length " + std::to_string(w.length()) +
                                  ", detector expects " + std::to_string(length));
    }
  }
}

}  // namespace

double frame_auroc(const Detector& detector, const std::vector<data::WindowSample>& windows) {
  const auto fs = flatten_frames(predict_windows(detector, windows), windows);
  return eval::roc_auc(fs.scores, fs.labels);
}

DetectorTrainResult train_detector(const DetectorConfig& config,
                                   const std::vector<data::WindowSample>& train,
                                   const std::vector<data::WindowSample>& validation, Rng& rng) {
  config.validate();
  if (train.empty()) throw std::invalid_argument("train_detector: no training windows");
  check_lengths(train, config.window_length, "training");
  check_lengths(validation, config.window_length, "validation");

  DetectorTrainResult result{Detector(config, rng), {}, 0};
  auto& det = result.detector;
  const auto params = det.parameters();
  nn::Adam optimizer(params, {config.learning_rate, config.weight_decay});

  std::vector<int> validation_labels;
  for (const auto& w : validation)
    for (const auto& f : w.frames) validation_labels.push_back(f.label);
  const bool use_auroc = both_classes(validation_labels);

  std::vector<std::vector<double>> best_values;
  auto snapshot = [&] {
    best_values.clear();
    for (const auto& p : params) best_values.emplace_back(p.tensor.values().begin(), p.tensor.values().end());
  };
  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<const data::WindowSample*> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(&train[order[i]]);
      optimizer.zero_grad();
      const auto features = data::pack_features_time_major(batch, config.input_mode);
      const auto targets = data::pack_labels_time_major(batch);
      const Tensor loss = nn::bce_with_logits(det.logits(features, batch.size()), targets);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw DetectorTrainingError(std::string("non-finite detector loss at epoch ") +
                                    std::to_string(epoch) + ", batch starting at " + std::to_string(begin));
      }
      loss.backward();
      optimizer.step();
      loss_sum += value * static_cast<double>(batch.size());
    }
    DetectorEpoch log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(order.size());
    log.validation_loss = std::numeric_limits<double>::quiet_NaN();
    log.validation_auroc = std::numeric_limits<double>::quiet_NaN();
    if (!validation.empty()) {
      const auto fs = flatten_frames(predict_windows(det, validation), validation);
      log.validation_loss = mean_bce(fs);
      if (use_auroc) log.validation_auroc = eval::roc_auc(fs.scores, fs.labels);
      const double score = use_auroc ? log.validation_auroc : -log.validation_loss;
      if (score > best) {
        best = score;
        since_best = 0;
        result.best_epoch = epoch;
        snapshot();
      } else {
        ++since_best;
      }
    } else {
      result.best_epoch = epoch;
    }
    result.history.push_back(log);
    if (!validation.empty() && since_best >= config.patience) break;
  }
  if (!best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto dst = params[i].tensor;
      std::copy(best_values[i].begin(), best_values[i].end(), dst.mutable_values().begin());
    }
  }
  return result;
}

std::vector<double> predict_sequence(const Detector& detector, const data::SequenceRecord& record,
                                     std::size_t stride) {
  const std::size_t t = detector.config().window_length;
  const std::size_t n = record.frames.size();
  if (n < t) {
    throw std::invalid_argument("predict_sequence: record '" + record.id + "' has " + std::to_string(n) +
                                " frames, fewer than the window length " + std::to_string(t));
  }
  if (stride == 0) throw std::invalid_argument("predict_sequence: stride must be > 0");
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + t <= n; s += stride) starts.push_back(s);
  if (starts.back() + t < n) starts.push_back(n - t);

  std::vector<data::WindowSample> windows;
  windows.reserve(starts.size());
  for (auto s : starts) {
    windows.push_back(data::make_window(
        std::vector<data::FrameFeature>(record.frames.begin() + static_cast<std::ptrdiff_t>(s),
                                        record.frames.begin() + static_cast<std::ptrdiff_t>(s + t)),
        record.id, s));
  }
  const auto probs = predict_windows(detector, windows);
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t w = 0; w < starts.size(); ++w) {
    for (std::size_t k = 0; k < t; ++k) {
      sum[starts[w] + k] += probs[w][k];
      ++count[starts[w] + k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) sum[i] /= static_cast<double>(count[i]);
  return sum;
}

void write_prediction_csv(std::ostream& out, const data::SequenceRecord& record,
                          std::span<const double> probabilities) {
  if (probabilities.size() != record.frames.size()) {
    throw std::invalid_argument("write_prediction_csv: probability count does not match record length");
  }
  out << "frame_index,probability,label\n";
  out.precision(17);
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    out << i << ',' << probabilities[i] << ',' << record.frames[i].label << '\n';
  }
}

void save_detector(const Detector& detector, const std::optional<data::Standardizer>& standardizer,
                   const std::string& path) {
  nlohmann::json j;
  j["kind"] = "mint-detector";
  j["backbone"] = to_string(detector.config().backbone);
  j["config"] = detector.config();
  j["params"] = nn::tensors_to_json(detector.parameters());
  j["standardizer"] = standardizer ? nlohmann::json(*standardizer) : nlohmann::json(nullptr);
  nn::write_json_file(j, path);
}

LoadedDetector load_detector(const std::string& path) {
  const auto j = nn::read_json_file(path);
  if (j.value("kind", std::string()) != "mint-detector") {
    throw nn::CheckpointError(path + " is not a detector checkpoint");
  }
  Rng rng(0);
  LoadedDetector loaded{Detector(j.at("config").get<DetectorConfig>(), rng), std::nullopt};
  auto params = loaded.detector.parameters();
  nn::tensors_from_json(j.at("params"), params);
  if (!j.at("standardizer").is_null()) loaded.standardizer = j.at("standardizer").get<data::Standardizer>();
  return loaded;
}

}  // namespace mint::detect
