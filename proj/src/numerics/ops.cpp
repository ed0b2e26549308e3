// SPDX-License-Identifier: Apache-2.0
#include "mint/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace mint::nn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;
using detail::Node;

[[noreturn]] void mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + to_string(a) + " and " +
                   to_string(b));
}

void require_same(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) mismatch(op, a.shape(), b.shape());
}

void require_rank(const char* op, const Tensor& a, std::size_t rank) {
  if (a.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                     " operand, got shape " + to_string(a.shape()));
  }
}

// Accumulation target for parent i, or nullptr when it takes no gradient.
double* grad_of(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  if (!p.requires_grad) return nullptr;
  p.ensure_grad();
  return p.grad.data();
}

const std::vector<double>& value_of(Node& self, std::size_t i) { return self.parents[i]->value; }

template <class F, class DF>
Tensor unary(const Tensor& a, F f, DF dfdx) {
  const auto in = a.values();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return Tensor::make_op(a.shape(), std::move(out), {a}, [dfdx](Node& self) {
    double* ga = grad_of(self, 0);
    if (!ga) return;
    const auto& x = value_of(self, 0);
    for (std::size_t i = 0; i < x.size(); ++i) ga[i] += self.grad[i] * dfdx(x[i], self.value[i]);
  });
}

// (outer, axis, inner) decomposition used by concat and slice.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.extent = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) mismatch("matmul", a.shape(), b.shape());
  std::vector<double> out(m * n);
  MutMap(out.data(), m, n).noalias() =
      ConstMap(a.values().data(), m, k) * ConstMap(b.values().data(), k, n);
  return Tensor::make_op({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    ConstMap g(self.grad.data(), m, n);
    if (double* ga = grad_of(self, 0)) {
      MutMap(ga, m, k).noalias() += g * ConstMap(value_of(self, 1).data(), k, n).transpose();
    }
    if (double* gb = grad_of(self, 1)) {
      MutMap(gb, k, n).noalias() += ConstMap(value_of(self, 0).data(), m, k).transpose() * g;
    }
  });
}

Tensor bmm(const Tensor& a, const Tensor& b) {
  require_rank("bmm", a, 3);
  require_rank("bmm", b, 3);
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2), n = b.dim(2);
  if (b.dim(0) != batch || b.dim(1) != k) mismatch("bmm", a.shape(), b.shape());
  std::vector<double> out(batch * m * n);
  for (std::size_t i = 0; i < batch; ++i) {
    MutMap(out.data() + i * m * n, m, n).noalias() =
        ConstMap(a.values().data() + i * m * k, m, k) *
        ConstMap(b.values().data() + i * k * n, k, n);
  }
  return Tensor::make_op({batch, m, n}, std::move(out), {a, b}, [batch, m, k, n](Node& self) {
    double* ga = grad_of(self, 0);
    double* gb = grad_of(self, 1);
    const auto& av = value_of(self, 0);
    const auto& bv = value_of(self, 1);
    for (std::size_t i = 0; i < batch; ++i) {
      ConstMap g(self.grad.data() + i * m * n, m, n);
      if (ga) {
        MutMap(ga + i * m * k, m, k).noalias() +=
            g * ConstMap(bv.data() + i * k * n, k, n).transpose();
      }
      if (gb) {
        MutMap(gb + i * k * n, k, n).noalias() +=
            ConstMap(av.data() + i * m * k, m, k).transpose() * g;
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_rank("transpose", a, 2);
  return permute(a, {1, 0});
}

Tensor permute(const Tensor& a, const std::vector<std::size_t>& axes) {
  const Shape& in_shape = a.shape();
  const std::size_t r = in_shape.size();
  if (axes.size() != r) {
    throw ShapeError("permute: " + std::to_string(axes.size()) + " axes for shape " +
                     to_string(in_shape));
  }
  std::vector<bool> used(r, false);
  for (auto ax : axes) {
    if (ax >= r || used[ax]) throw ShapeError("permute: invalid axis order for " + to_string(in_shape));
    used[ax] = true;
  }
  Shape out_shape(r);
  for (std::size_t i = 0; i < r; ++i) out_shape[i] = in_shape[axes[i]];
  std::vector<std::size_t> in_stride(r, 1);
  for (std::size_t i = r; i-- > 1;) in_stride[i - 1] = in_stride[i] * in_shape[i];

  const std::size_t n = a.numel();
  auto index = std::make_shared<std::vector<std::size_t>>(n);
  std::vector<std::size_t> counter(r, 0);
  for (std::size_t o = 0; o < n; ++o) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < r; ++i) src += counter[i] * in_stride[axes[i]];
    (*index)[o] = src;
    for (std::size_t i = r; i-- > 0;) {
      if (++counter[i] < out_shape[i]) break;
      counter[i] = 0;
    }
  }
  const auto in = a.values();
  std::vector<double> out(n);
  for (std::size_t o = 0; o < n; ++o) out[o] = in[(*index)[o]];
  return Tensor::make_op(std::move(out_shape), std::move(out), {a}, [index](Node& self) {
    double* ga = grad_of(self, 0);
    if (!ga) return;
    for (std::size_t o = 0; o < index->size(); ++o) ga[(*index)[o]] += self.grad[o];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) mismatch("reshape", a.shape(), shape);
  std::vector<double> out(a.values().begin(), a.values().end());
  return Tensor::make_op(std::move(shape), std::move(out), {a}, [](Node& self) {
    double* ga = grad_of(self, 0);
    if (!ga) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same("add", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Tensor::make_op(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (double* g = grad_of(self, p)) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same("sub", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return Tensor::make_op(a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (double* g = grad_of(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
    if (double* g = grad_of(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same("mul", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return Tensor::make_op(a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& av = value_of(self, 0);
    const auto& bv = value_of(self, 1);
    if (double* g = grad_of(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * bv[i];
    }
    if (double* g = grad_of(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * av[i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor add_bias(const Tensor& a, const Tensor& b) {
  require_rank("add_bias", b, 1);
  if (a.rank() == 0 || a.shape().back() != b.dim(0)) mismatch("add_bias", a.shape(), b.shape());
  const std::size_t n = b.dim(0), rows = a.numel() / n;
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += b[c];
  return Tensor::make_op(a.shape(), std::move(out), {a, b}, [n, rows](Node& self) {
    if (double* g = grad_of(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
    if (double* g = grad_of(self, 1)) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < n; ++c) g[c] += self.grad[r * n + c];
    }
  });
}

Tensor mul_rowvec(const Tensor& a, const Tensor& gvec) {
  require_rank("mul_rowvec", gvec, 1);
  if (a.rank() == 0 || a.shape().back() != gvec.dim(0)) {
    mismatch("mul_rowvec", a.shape(), gvec.shape());
  }
  const std::size_t n = gvec.dim(0), rows = a.numel() / n;
  std::vector<double> out(a.numel());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = a[r * n + c] * gvec[c];
  return Tensor::make_op(a.shape(), std::move(out), {a, gvec}, [n, rows](Node& self) {
    const auto& av = value_of(self, 0);
    const auto& gv = value_of(self, 1);
    double* ga = grad_of(self, 0);
    double* gg = grad_of(self, 1);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const double g = self.grad[r * n + c];
        if (ga) ga[r * n + c] += g * gv[c];
        if (gg) gg[c] += g * av[r * n + c];
      }
    }
  });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) {
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " +
                     to_string(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> extents;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size()) mismatch("concat", first, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != first[i]) mismatch("concat", first, s);
    }
    extents.push_back(s[axis]);
    out_shape[axis] += s[axis];
  }
  const AxisSplit sp = split_at(out_shape, axis);
  std::vector<double> out(shape_numel(out_shape));
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto in = parts[p].values();
    const std::size_t block = extents[p] * sp.inner;
    for (std::size_t o = 0; o < sp.outer; ++o) {
      std::copy_n(in.data() + o * block, block,
                  out.data() + o * sp.extent * sp.inner + offset * sp.inner);
    }
    offset += extents[p];
  }
  return Tensor::make_op(std::move(out_shape), std::move(out), parts,
                         [sp, extents](Node& self) {
                           std::size_t off = 0;
                           for (std::size_t p = 0; p < extents.size(); ++p) {
                             const std::size_t block = extents[p] * sp.inner;
                             if (double* g = grad_of(self, p)) {
                               for (std::size_t o = 0; o < sp.outer; ++o) {
                                 const double* src =
                                     self.grad.data() + o * sp.extent * sp.inner + off * sp.inner;
                                 for (std::size_t i = 0; i < block; ++i) g[o * block + i] += src[i];
                               }
                             }
                             off += extents[p];
                           }
                         });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Shape& s = a.shape();
  if (axis >= s.size() || begin > end || end > s[axis]) {
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") on axis " + std::to_string(axis) + " invalid for " + to_string(s));
  }
  const AxisSplit sp = split_at(s, axis);
  Shape out_shape = s;
  out_shape[axis] = end - begin;
  const std::size_t block = (end - begin) * sp.inner;
  std::vector<double> out(sp.outer * block);
  const auto in = a.values();
  for (std::size_t o = 0; o < sp.outer; ++o) {
    std::copy_n(in.data() + o * sp.extent * sp.inner + begin * sp.inner, block,
                out.data() + o * block);
  }
  return Tensor::make_op(std::move(out_shape), std::move(out), {a}, [sp, begin, block](Node& self) {
    double* g = grad_of(self, 0);
    if (!g) return;
    for (std::size_t o = 0; o < sp.outer; ++o) {
      double* dst = g + o * sp.extent * sp.inner + begin * sp.inner;
      for (std::size_t i = 0; i < block; ++i) dst[i] += self.grad[o * block + i];
    }
  });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(a, [](double x) { return std::log(std::max(x, kLogFloor)); },
               [](double x, double) { return x > kLogFloor ? 1.0 / x : 0.0; });
}

Tensor square(const Tensor& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor clamp_min(const Tensor& a, double floor) {
  return unary(a, [floor](double x) { return std::max(x, floor); },
               [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

Tensor softmax(const Tensor& a) {
  if (a.rank() == 0) throw ShapeError("softmax: scalar operand");
  const std::size_t n = a.shape().back(), rows = a.numel() / n;
  const auto in = a.values();
  std::vector<double> out(a.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = in.data() + r * n;
    double* y = out.data() + r * n;
    const double mx = *std::max_element(x, x + n);
    double z = 0.0;
    for (std::size_t c = 0; c < n; ++c) z += (y[c] = std::exp(x[c] - mx));
    for (std::size_t c = 0; c < n; ++c) y[c] /= z;
  }
  return Tensor::make_op(a.shape(), std::move(out), {a}, [n, rows](Node& self) {
    double* g = grad_of(self, 0);
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = self.value.data() + r * n;
      const double* gy = self.grad.data() + r * n;
      double dot = 0.0;
      for (std::size_t c = 0; c < n; ++c) dot += gy[c] * y[c];
      for (std::size_t c = 0; c < n; ++c) g[r * n + c] += y[c] * (gy[c] - dot);
    }
  });
}

Tensor sum(const Tensor& a) {
  const auto in = a.values();
  const double s = std::accumulate(in.begin(), in.end(), 0.0);
  return Tensor::make_op({}, {s}, {a}, [](Node& self) {
    double* g = grad_of(self, 0);
    if (!g) return;
    const std::size_t n = self.parents[0]->value.size();
    for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw ShapeError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor sum_last(const Tensor& a) {
  if (a.rank() == 0) throw ShapeError("sum_last: scalar operand");
  const std::size_t n = a.shape().back(), rows = a.numel() / n;
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  std::vector<double> out(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r] += a[r * n + c];
  return Tensor::make_op(std::move(out_shape), std::move(out), {a}, [n, rows](Node& self) {
    double* g = grad_of(self, 0);
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < n; ++c) g[r * n + c] += self.grad[r];
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  require_rank("layer_norm", gamma, 1);
  require_same("layer_norm", gamma, beta);
  if (x.rank() == 0 || x.shape().back() != gamma.dim(0)) {
    mismatch("layer_norm", x.shape(), gamma.shape());
  }
  const std::size_t n = gamma.dim(0), rows = x.numel() / n;
  auto xhat = std::make_shared<std::vector<double>>(x.numel());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.values().data() + r * n;
    double mu = 0.0;
    for (std::size_t c = 0; c < n; ++c) mu += xr[c];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) var += (xr[c] - mu) * (xr[c] - mu);
    var /= static_cast<double>(n);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t c = 0; c < n; ++c) {
      const double h = (xr[c] - mu) * is;
      (*xhat)[r * n + c] = h;
      out[r * n + c] = gamma[c] * h + beta[c];
    }
  }
  return Tensor::make_op(x.shape(), std::move(out), {x, gamma, beta},
                         [n, rows, xhat, inv_std](Node& self) {
                           const auto& gv = value_of(self, 1);
                           double* gx = grad_of(self, 0);
                           double* gg = grad_of(self, 1);
                           double* gb = grad_of(self, 2);
                           const double inv_n = 1.0 / static_cast<double>(n);
                           for (std::size_t r = 0; r < rows; ++r) {
                             const double* g = self.grad.data() + r * n;
                             const double* h = xhat->data() + r * n;
                             double m1 = 0.0, m2 = 0.0;
                             for (std::size_t c = 0; c < n; ++c) {
                               const double dh = g[c] * gv[c];
                               m1 += dh;
                               m2 += dh * h[c];
                               if (gg) gg[c] += g[c] * h[c];
                               if (gb) gb[c] += g[c];
                             }
                             if (!gx) continue;
                             m1 *= inv_n;
                             m2 *= inv_n;
                             for (std::size_t c = 0; c < n; ++c) {
                               gx[r * n + c] +=
                                   (*inv_std)[r] * (g[c] * gv[c] - m1 - h[c] * m2);
                             }
                           }
                         });
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  std::vector<double>& running_mean, std::vector<double>& running_var,
                  bool training, double momentum, double eps) {
  require_rank("batch_norm", x, 2);
  require_rank("batch_norm", gamma, 1);
  require_same("batch_norm", gamma, beta);
  const std::size_t rows = x.dim(0), n = x.dim(1);
  if (gamma.dim(0) != n) mismatch("batch_norm", x.shape(), gamma.shape());
  if (running_mean.size() != n || running_var.size() != n) {
    throw ShapeError("batch_norm: running statistics sized " + std::to_string(running_mean.size()) +
                     " for " + std::to_string(n) + " channels");
  }
  if (training && rows < 2) {
    throw ShapeError("batch_norm: training mode needs at least 2 rows, got shape " +
                     to_string(x.shape()));
  }
  const auto xv = x.values();
  auto xhat = std::make_shared<std::vector<double>>(x.numel());
  auto inv_std = std::make_shared<std::vector<double>>(n);
  std::vector<double> mu(n, 0.0), var(n, 0.0);
  if (training) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < n; ++c) mu[c] += xv[r * n + c];
    for (auto& m : mu) m /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const double d = xv[r * n + c] - mu[c];
        var[c] += d * d;
      }
    for (std::size_t c = 0; c < n; ++c) {
      const double biased = var[c] / static_cast<double>(rows);
      const double unbiased = var[c] / static_cast<double>(rows - 1);
      running_mean[c] = (1.0 - momentum) * running_mean[c] + momentum * mu[c];
      running_var[c] = (1.0 - momentum) * running_var[c] + momentum * unbiased;
      var[c] = biased;
    }
  } else {
    mu = running_mean;
    var = running_var;
  }
  for (std::size_t c = 0; c < n; ++c) (*inv_std)[c] = 1.0 / std::sqrt(var[c] + eps);
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double h = (xv[r * n + c] - mu[c]) * (*inv_std)[c];
      (*xhat)[r * n + c] = h;
      out[r * n + c] = gamma[c] * h + beta[c];
    }
  }
  return Tensor::make_op(
      x.shape(), std::move(out), {x, gamma, beta},
      [rows, n, xhat, inv_std, training](Node& self) {
        const auto& gv = value_of(self, 1);
        double* gx = grad_of(self, 0);
        double* gg = grad_of(self, 1);
        double* gb = grad_of(self, 2);
        std::vector<double> m1(n, 0.0), m2(n, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < n; ++c) {
            const double g = self.grad[r * n + c];
            const double h = (*xhat)[r * n + c];
            if (gg) gg[c] += g * h;
            if (gb) gb[c] += g;
            m1[c] += g * gv[c];
            m2[c] += g * gv[c] * h;
          }
        }
        if (!gx) return;
        const double inv_rows = 1.0 / static_cast<double>(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < n; ++c) {
            const double dh = self.grad[r * n + c] * gv[c];
            if (training) {
              gx[r * n + c] += (*inv_std)[c] *
                               (dh - m1[c] * inv_rows - (*xhat)[r * n + c] * m2[c] * inv_rows);
            } else {
              gx[r * n + c] += (*inv_std)[c] * dh;
            }
          }
        }
      });
}

Tensor dropout_with_mask(const Tensor& x, const std::vector<double>& keep_mask, double rate) {
  if (keep_mask.size() != x.numel()) {
    throw ShapeError("dropout: mask of " + std::to_string(keep_mask.size()) +
                     " entries for shape " + to_string(x.shape()));
  }
  const double inv_keep = 1.0 / (1.0 - rate);
  std::vector<double> m(keep_mask.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = keep_mask[i] * inv_keep;
  return mul(x, Tensor(x.shape(), std::move(m)));
}

Tensor dropout(const Tensor& x, double rate, Rng& rng, bool training) {
  if (!training || rate <= 0.0) return x;
  if (rate >= 1.0) throw std::invalid_argument("dropout: rate must be < 1");
  std::vector<double> mask(x.numel());
  for (auto& m : mask) m = rng.bernoulli(1.0 - rate) ? 1.0 : 0.0;
  return dropout_with_mask(x, mask, rate);
}

Tensor huber_norm(const Tensor& r, double delta) {
  require_rank("huber_norm", r, 2);
  if (!(delta > 0)) throw std::invalid_argument("huber_norm: delta must be > 0");
  const std::size_t rows = r.dim(0), d = r.dim(1);
  auto dvalue = std::make_shared<std::vector<double>>(r.numel());
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ri = r.values().data() + i * d;
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) sq += ri[c] * ri[c];
    const double norm = std::sqrt(sq);
    if (norm <= delta) {
      out[i] = sq / (2.0 * delta);
      for (std::size_t c = 0; c < d; ++c) (*dvalue)[i * d + c] = ri[c] / delta;
    } else {
      out[i] = norm - 0.5 * delta;
      for (std::size_t c = 0; c < d; ++c) (*dvalue)[i * d + c] = ri[c] / norm;
    }
  }
  return Tensor::make_op({rows}, std::move(out), {r}, [rows, d, dvalue](Node& self) {
    double* g = grad_of(self, 0);
    if (!g) return;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t c = 0; c < d; ++c) g[i * d + c] += self.grad[i] * (*dvalue)[i * d + c];
  });
}

Tensor bce_with_logits(const Tensor& logits, const Tensor& targets) {
  require_same("bce_with_logits", logits, targets);
  const std::size_t n = logits.numel();
  if (n == 0) throw ShapeError("bce_with_logits: empty operands");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = logits[i], y = targets[i];
    total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
  }
  return Tensor::make_op({}, {total / static_cast<double>(n)}, {logits, targets},
                         [n](Node& self) {
                           const auto& x = value_of(self, 0);
                           const auto& y = value_of(self, 1);
                           const double s = self.grad[0] / static_cast<double>(n);
                           if (double* g = grad_of(self, 0)) {
                             for (std::size_t i = 0; i < n; ++i) {
                               const double p = x[i] >= 0 ? 1.0 / (1.0 + std::exp(-x[i]))
                                                          : std::exp(x[i]) / (1.0 + std::exp(x[i]));
                               g[i] += s * (p - y[i]);
                             }
                           }
                           if (double* g = grad_of(self, 1)) {
                             for (std::size_t i = 0; i < n; ++i) g[i] -= s * x[i];
                           }
                         });
}

}  // namespace mint::nn
