// SPDX-License-Identifier: Apache-2.0
#include "mint/numerics/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace mint::nn {

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("Tensor: shape " + to_string(shape) + " holds " +
                     std::to_string(shape_numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(Shape{}, {value}, requires_grad);
}

detail::Node& Tensor::checked() const {
  if (!node_) throw std::logic_error("Tensor: use of undefined tensor");
  return *node_;
}

const Shape& Tensor::shape() const { return checked().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) {
    throw ShapeError("Tensor::dim: axis " + std::to_string(axis) +
                     " out of range for shape " + to_string(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const { return checked().value.size(); }

std::size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeError("Tensor::rows: expected 2-D, got " + to_string(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw ShapeError("Tensor::cols: expected 2-D, got " + to_string(shape()));
  return shape()[1];
}

std::span<const double> Tensor::values() const { return checked().value; }
std::span<double> Tensor::mutable_values() { return checked().value; }

double Tensor::at(std::size_t r, std::size_t c) const { return values()[r * cols() + c]; }

double Tensor::item() const {
  if (numel() != 1) {
    throw ShapeError("Tensor::item: tensor of shape " + to_string(shape()) + " is not a scalar");
  }
  return values()[0];
}

bool Tensor::requires_grad() const { return checked().requires_grad; }
bool Tensor::has_grad() const { return !checked().grad.empty(); }
std::span<const double> Tensor::grad() const { return checked().grad; }

std::span<double> Tensor::mutable_grad() {
  checked().ensure_grad();
  return node_->grad;
}

void Tensor::zero_grad() {
  auto& n = checked();
  std::fill(n.grad.begin(), n.grad.end(), 0.0);
}

void Tensor::backward() const {
  auto& root = checked();
  if (root.value.size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " + to_string(root.shape));
  }
  if (!root.requires_grad) return;

  // Iterative post-order DFS; `order` ends up parents-before-children.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{&root, 0}};
  seen.insert(&root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (auto* n : order) {
    if (!n->is_leaf()) n->grad.assign(n->value.size(), 0.0);
  }
  root.ensure_grad();
  root.grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!(*it)->is_leaf()) (*it)->backward(**it);
  }
}

Tensor Tensor::detach() const {
  return Tensor(shape(), std::vector<double>(values().begin(), values().end()), false);
}

Tensor Tensor::clone() const {
  Tensor t(shape(), std::vector<double>(values().begin(), values().end()), requires_grad());
  return t;
}

Tensor Tensor::make_op(Shape shape, std::vector<double> values, std::vector<Tensor> inputs,
                       std::function<void(detail::Node&)> backward) {
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  const bool any = std::any_of(inputs.begin(), inputs.end(),
                               [](const Tensor& t) { return t.requires_grad(); });
  if (any) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (auto& t : inputs) node->parents.push_back(t.node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

}  // namespace mint::nn
