// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mint/numerics/adam.hpp"
#include "mint/numerics/gradcheck.hpp"
#include "mint/numerics/layers.hpp"
#include "mint/numerics/ops.hpp"
#include "mint/numerics/rng.hpp"

using namespace mint::nn;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, bool requires_grad = true, double scale_ = 1.0) {
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = scale_ * rng.normal();
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

}  // namespace

TEST(Tensor, ShapeMustMatchValueCount) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ShapeError);
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_DOUBLE_EQ(t.at(1, 2), 6.0);
}

TEST(Ops, SoftmaxOfZerosIsUniform) {
  const Tensor y = softmax(Tensor::zeros({7}));
  for (double v : y.values()) EXPECT_DOUBLE_EQ(v, 1.0 / 7.0);
}

TEST(Ops, SoftmaxRowsSumToOne) {
  Rng rng(3);
  const Tensor y = softmax(random_tensor({50, 7}, rng, false, 20.0));
  for (std::size_t r = 0; r < 50; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 7; ++c) {
      const double v = y.at(r, c);
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Ops, SigmoidOfZeroIsHalf) {
  EXPECT_DOUBLE_EQ(sigmoid(Tensor::scalar(0.0)).item(), 0.5);
}

TEST(Ops, IdentityMatmul) {
  Rng rng(1);
  const Tensor a = random_tensor({3, 5}, rng, false);
  const Tensor eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  const Tensor y = matmul(eye, a);
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_DOUBLE_EQ(y[i], a[i]);
}

TEST(Ops, ShapeMismatchNamesOpAndShapes) {
  try {
    matmul(Tensor::zeros({2, 3}), Tensor::zeros({4, 2}));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos);
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos);
    EXPECT_NE(msg.find("[4, 2]"), std::string::npos);
  }
  EXPECT_THROW(add(Tensor::zeros({2}), Tensor::zeros({3})), ShapeError);
}

TEST(Ops, LogIsGuardedAgainstZero) {
  const Tensor y = log(Tensor({2}, {0.0, 1.0}));
  EXPECT_TRUE(std::isfinite(y[0]));
  EXPECT_DOUBLE_EQ(y[0], std::log(kLogFloor));
  EXPECT_DOUBLE_EQ(y[1], 0.0);
}

TEST(Backward, SumOfSquares) {
  Tensor x({2}, {1.0, 2.0}, true);
  sum(square(x)).backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 2.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 4.0);
}

TEST(Backward, SigmoidTimesConstant) {
  Tensor w = Tensor::scalar(0.0, true);
  scale(sigmoid(w), 4.0).backward();
  EXPECT_DOUBLE_EQ(w.grad()[0], 1.0);
}

TEST(Backward, RepeatedCallsAccumulate) {
  Tensor x({2}, {1.0, 2.0}, true);
  const Tensor loss = sum(square(x));
  loss.backward();
  loss.backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 8.0);
}

TEST(Backward, NonScalarLossIsRejected) {
  Tensor x({2}, {1.0, 2.0}, true);
  EXPECT_THROW(square(x).backward(), ShapeError);
}

TEST(GradCheck, QuadraticAtThree) {
  Tensor x = Tensor::scalar(3.0, true);
  std::vector<Tensor> params{x};
  const double err = grad_check([&] { return square(x); }, params);
  EXPECT_LT(err, 1e-8);
}

// Every primitive, composed into a scalar, against central differences.
TEST(GradCheck, AllPrimitives) {
  Rng rng(11);
  Tensor a = random_tensor({4, 3}, rng);
  Tensor b = random_tensor({3, 5}, rng);
  Tensor c = random_tensor({4, 5}, rng);
  Tensor bias = random_tensor({5}, rng);
  Tensor gamma = random_tensor({5}, rng);
  Tensor beta = random_tensor({5}, rng);
  Tensor p3 = random_tensor({2, 3, 4}, rng);
  Tensor q3 = random_tensor({2, 4, 3}, rng);
  std::vector<double> rm(5, 0.0), rv(5, 1.0);
  std::vector<Tensor> params{a, b, c, bias, gamma, beta, p3, q3};

  auto fn = [&] {
    Tensor y = add_bias(matmul(a, b), bias);                 // [4,5]
    y = add(y, mul(c, tanh(y)));
    y = layer_norm(y, gamma, beta);
    y = batch_norm(y, gamma, beta, rm, rv, true);
    Tensor s = softmax(y);
    Tensor parts = concat({slice(s, 1, 0, 2), sigmoid(slice(y, 1, 2, 5))}, 1);
    Tensor z = mul_rowvec(parts, gamma);
    Tensor w = bmm(p3, q3);                                  // [2,3,3]
    Tensor wp = reshape(permute(w, {0, 2, 1}), {6, 3});
    Tensor total = add(sum(square(z)), mean(exp(scale(sub(wp, transpose(transpose(wp))), 0.3))));
    total = add(total, sum(log(add_scalar(sigmoid(wp), 0.5))));
    total = add(total, sum(relu(add_scalar(wp, 0.1))));
    total = add(total, sum(clamp_min(sum_last(wp), -0.2)));
    total = add(total, sum(huber_norm(reshape(wp, {9, 2}), 1.0)));
    return add(total, bce_with_logits(slice(y, 1, 0, 1), Tensor({4, 1}, {1, 0, 1, 0})));
  };
  EXPECT_LT(grad_check(fn, params), 1e-6);
}

TEST(GradCheck, HuberAtHalf) {
  Tensor r({1, 2}, {0.3, 0.4}, true);  // |r| = 0.5
  std::vector<Tensor> params{r};
  EXPECT_NEAR(huber_norm(r, 1.0).item(), 0.125, 1e-15);
  EXPECT_LT(grad_check([&] { return sum(huber_norm(r, 1.0)); }, params), 1e-6);
}

TEST(GradCheck, RecurrentCellsAndAttention) {
  Rng rng(5);
  GruCell gru(3, 4, rng);
  LstmCell lstm(3, 4, rng);
  TransformerEncoderBlock block(8, 4, 16, rng);
  ParamList named;
  gru.collect("gru", named);
  lstm.collect("lstm", named);
  block.collect("block", named);
  std::vector<Tensor> params;
  for (auto& p : named) params.push_back(p.tensor);
  const Tensor x = random_tensor({3 * 2, 3}, rng, false);  // time-major, T=3, B=2
  const Tensor xt = random_tensor({2 * 3, 8}, rng, false);

  auto fn = [&] {
    auto steps = split_time_major(gru.project_input(x), 3);
    Tensor h = Tensor::zeros({2, 4});
    for (auto& s : steps) h = gru.step(s, h);
    auto lsteps = split_time_major(lstm.project_input(x), 3);
    Tensor lh = Tensor::zeros({2, 4}), lc = Tensor::zeros({2, 4});
    for (auto& s : lsteps) std::tie(lh, lc) = lstm.step(s, lh, lc);
    return add(add(sum(square(h)), sum(lh)), sum(square(block.forward(xt, 2, 3))));
  };
  GradCheckOptions opts;
  opts.max_coords_per_tensor = 6;
  EXPECT_LT(grad_check(fn, params, opts), 1e-6);
}

TEST(BatchNorm, InferenceUsesFrozenRunningStatistics) {
  BatchNorm1d bn(3);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) bn.forward(random_tensor({16, 3}, rng, false, 3.0), Mode::kTrain);
  const auto mean_before = bn.running_mean();
  const Tensor x = random_tensor({4, 3}, rng, false);
  const Tensor y1 = bn.forward(x, Mode::kEval);
  const Tensor y2 = bn.forward(x, Mode::kEval);
  EXPECT_EQ(bn.running_mean(), mean_before);
  for (std::size_t i = 0; i < y1.numel(); ++i) EXPECT_EQ(y1[i], y2[i]);
  // Row-independence in inference mode: each row depends only on itself.
  const Tensor y_row = bn.forward(slice(x, 0, 1, 2), Mode::kEval);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(y_row[c], y1.at(1, c));
}

TEST(Dropout, IdentityInInferenceAndInvertedScaling) {
  Rng rng(4);
  const Tensor x = Tensor::full({1000}, 1.0);
  const Tensor eval = dropout(x, 0.2, rng, false);
  for (double v : eval.values()) EXPECT_EQ(v, 1.0);
  const Tensor tr = dropout(x, 0.2, rng, true);
  for (double v : tr.values()) EXPECT_TRUE(v == 0.0 || std::abs(v - 1.25) < 1e-15);
}

TEST(Adam, FirstStepFromZero) {
  std::vector<double> theta{0.0};
  std::vector<double> g{1.0};
  AdamState st;
  AdamConfig cfg;
  adam_update(theta, g, st, cfg);
  // m_hat = v_hat = 1 after bias correction.
  EXPECT_NEAR(theta[0], -1e-3 * (1.0 / (1.0 + 1e-8)), 1e-18);
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, ZeroGradientLeavesParameter) {
  std::vector<double> theta{0.7, -1.3};
  std::vector<double> g{0.0, 0.0};
  AdamState st;
  adam_update(theta, g, st, AdamConfig{});
  EXPECT_EQ(theta[0], 0.7);
  EXPECT_EQ(theta[1], -1.3);
}

TEST(Adam, IdenticalInputsGiveIdenticalUpdates) {
  std::vector<double> a{0.5}, b{0.5};
  AdamState sa, sb;
  AdamConfig cfg;
  cfg.weight_decay = 1e-5;
  for (int i = 0; i < 5; ++i) {
    std::vector<double> g{0.1 * i - 0.2};
    adam_update(a, g, sa, cfg);
    adam_update(b, g, sb, cfg);
  }
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(sa.step, 5);
}

TEST(Adam, ShapeMismatchIsRejected) {
  std::vector<double> theta{0.0, 1.0};
  std::vector<double> g{1.0};
  AdamState st;
  EXPECT_THROW(adam_update(theta, g, st, AdamConfig{}), ShapeError);
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.normal(), b.normal());
  }
  // mt19937_64 is pinned by the standard: the 10000th output for the
  // default seed 5489 is 9981545732273789042.
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ULL);
}

TEST(Rng, NormalMoments) {
  Rng rng(9);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
