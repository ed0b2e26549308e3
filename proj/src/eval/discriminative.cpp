// SPDX-License-Identifier: Apache-2.0
#include "mint/eval/discriminative.hpp"

#include <cmath>
#include <map>
#include <string>
#include <numeric>

#include "mint/data/tensorize.hpp"
#include "mint/eval/metrics.hpp"
#include "mint/numerics/layers.hpp"

namespace mint::eval {

namespace {

struct Sample {
  const data::WindowSample* window;
  double label;  // 1 real, 0 synthetic
};

class RealFakeClassifier {
 public:
  RealFakeClassifier(std::size_t hidden, nn::Rng& rng)
      : gru_(data::kFrameDims, hidden, rng), head_(hidden, 1, rng) {}

  nn::Tensor logits(std::span<const Sample> batch) const {
    std::vector<const data::WindowSample*> windows;
    for (const auto& s : batch) windows.push_back(s.window);
    const std::size_t steps = windows.front()->length();
    const auto x = data::pack_time_major(windows, 0, steps);
    nn::Tensor h = nn::Tensor::zeros({batch.size(), gru_.hidden()});
    for (const auto& g : nn::split_time_major(gru_.project_input(x), steps)) h = gru_.step(g, h);
    return head_.forward(h);
  }

  nn::ParamList parameters() const {
    nn::ParamList out;
    gru_.collect("gru", out);
    head_.collect("head", out);
    return out;
  }

 private:
  nn::GruCell gru_;
  nn::Linear head_;
};

// Windows cut from the same record stay on one side of the split so overlapping
// windows cannot leak between train and test.
std::pair<std::vector<Sample>, std::vector<Sample>> split_class(const std::vector<data::WindowSample>& windows,
                                                              double label, double fraction, nn::Rng& rng) {
  std::map<std::string, std::vector<std::size_t>> by_record;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].record_id.empty()) {
      groups.push_back({i});
    } else {
      by_record[windows[i].record_id].push_back(i);
    }
  }
  for (auto& [id, members] : by_record) groups.push_back(std::move(members));
  rng.shuffle(std::span<std::vector<std::size_t>>(groups));
  const auto target = static_cast<std::size_t>(std::round(fraction * static_cast<double>(windows.size())));
  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  for (const auto& g : groups) {
    auto& side = out.first.size() < target ? out.first : out.second;
    for (std::size_t i : g) side.push_back({&windows[i], label});
  }
  return out;
}

}  // namespace

DiscriminativeResult discriminative_score(const std::vector<data::WindowSample>& real,
                                          const std::vector<data::WindowSample>& synthetic,
                                          nn::Rng& rng, const DiscriminativeOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw MetricError("discriminative_score: train_fraction must lie in (0, 1)");
  }
  auto [real_train, real_test] = split_class(real, 1.0, options.train_fraction, rng);
  auto [fake_train, fake_test] = split_class(synthetic, 0.0, options.train_fraction, rng);
  if (real_train.empty() || real_test.empty() || fake_train.empty() || fake_test.empty()) {
    throw MetricError("discriminative_score: sets of " + std::to_string(real.size()) + " real and " +
                      std::to_string(synthetic.size()) + " synthetic windows are too small to split");
  }
  std::vector<Sample> train = real_train, test = real_test;
  train.insert(train.end(), fake_train.begin(), fake_train.end());
  test.insert(test.end(), fake_test.begin(), fake_test.end());
  const std::size_t len = train.front().window->length();
  for (const auto* set : {&train, &test}) {
    for (const auto& s : *set) {
      if (s.window->length() != len) throw MetricError("discriminative_score: windows of unequal length");
    }
  }

  RealFakeClassifier model(options.hidden, rng);
  nn::Adam optimizer(model.parameters(), {options.learning_rate, 0.0});
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<Sample>(train));
    for (std::size_t begin = 0; begin < train.size(); begin += options.batch_size) {
      const auto batch = std::span<const Sample>(train).subspan(
          begin, std::min(options.batch_size, train.size() - begin));
      std::vector<double> y;
      for (const auto& s : batch) y.push_back(s.label);
      optimizer.zero_grad();
      const auto loss = nn::bce_with_logits(model.logits(batch), nn::Tensor({batch.size(), 1}, y));
      loss.backward();
      optimizer.step();
    }
  }

  std::size_t correct = 0;
  for (std::size_t begin = 0; begin < test.size(); begin += options.batch_size) {
    const auto batch = std::span<const Sample>(test).subspan(
        begin, std::min(options.batch_size, test.size() - begin));
    const auto logits = model.logits(batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double predicted = logits[i] >= 0.0 ? 1.0 : 0.0;
      correct += predicted == batch[i].label;
    }
  }
  DiscriminativeResult r;
  r.train_size = train.size();
  r.test_size = test.size();
  r.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  r.score = std::abs(0.5 - r.accuracy);
  return r;
}

}  // namespace mint::eval
