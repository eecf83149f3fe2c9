// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/autodiff/graph.hpp"

#include <algorithm>

#include "aquacast/errors.hpp"

namespace aquacast::ad {

const Shape& Tensor::shape() const { return graph_->nodes_[id_].shape; }

std::span<const double> Tensor::values() const { return graph_->nodes_[id_].value; }

std::span<const double> Tensor::grad() const { return graph_->nodes_[id_].grad; }

bool Tensor::requires_grad() const { return graph_->nodes_[id_].requires_grad; }

double Tensor::item() const {
  const auto& v = graph_->nodes_[id_].value;
  if (v.size() != 1) {
    throw ContractError("item() on tensor of shape " + shape_str(shape()));
  }
  return v[0];
}

Array Tensor::to_array() const {
  const auto& n = graph_->nodes_[id_];
  return Array(n.shape, n.value);
}

Tensor Graph::constant(Array a) {
  Node n;
  n.op = "constant";
  n.shape = std::move(a.shape);
  n.value = std::move(a.values);
  n.leaf = true;
  nodes_.push_back(std::move(n));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Graph::parameter(Array a) {
  Node n;
  n.op = "parameter";
  n.shape = std::move(a.shape);
  n.value = std::move(a.values);
  n.grad.assign(n.value.size(), 0.0);
  n.requires_grad = true;
  n.leaf = true;
  nodes_.push_back(std::move(n));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Graph::emit(std::string_view op, std::vector<std::size_t> inputs, Shape shape,
                   std::vector<double> value, BackwardFn backward) {
  Node n;
  n.op = op;
  n.shape = std::move(shape);
  n.value = std::move(value);
  n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                [&](std::size_t i) { return nodes_[i].requires_grad; });
  if (n.requires_grad) {
    n.grad.assign(n.value.size(), 0.0);
    n.backward = std::move(backward);
  }
  n.inputs = std::move(inputs);
  nodes_.push_back(std::move(n));
  return Tensor(this, nodes_.size() - 1);
}

void Graph::backward(const Tensor& loss) {
  if (loss.graph() != this) throw ContractError("backward: loss belongs to another graph");
  Node& root = nodes_[loss.id()];
  if (root.value.size() != 1) {
    throw ContractError("backward requires a scalar loss, got shape " + shape_str(root.shape));
  }
  if (!root.requires_grad) return;
  for (std::size_t i = 0; i <= loss.id(); ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad && !n.leaf) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  }
  root.grad[0] += 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.backward) n.backward(*this, i);
  }
}

void Graph::zero_grad() {
  for (auto& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
}

std::vector<Graph::Record> Graph::records() const {
  std::vector<Record> out;
  out.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out.push_back({nodes_[i].op, nodes_[i].inputs, i});
  }
  return out;
}

}  // namespace aquacast::ad
