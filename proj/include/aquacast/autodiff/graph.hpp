// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "aquacast/autodiff/array.hpp"

namespace aquacast::ad {

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid as long as the graph is.
class Tensor {
 public:
  Tensor() = default;

  const Shape& shape() const;
  std::span<const double> values() const;
  /// Empty span when the node does not track gradients.
  std::span<const double> grad() const;
  bool requires_grad() const;
  double item() const;
  Array to_array() const;

  std::size_t id() const { return id_; }
  Graph* graph() const { return graph_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Tensor(Graph* g, std::size_t id) : graph_(g), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

/// Define-by-run tape. Every op appends one node whose inputs were created
/// earlier, so creation order is a topological order and backward walks it in
/// reverse.
class Graph {
 public:
  struct Record {
    std::string_view op;
    std::vector<std::size_t> inputs;
    std::size_t output;
  };

  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Tensor constant(Array a);
  Tensor parameter(Array a);

  /// Accumulates d(loss)/d(leaf) into every tracked leaf. Intermediate grads
  /// are recomputed from scratch on each call.
  void backward(const Tensor& loss);
  void zero_grad();

  std::size_t size() const { return nodes_.size(); }
  std::vector<Record> records() const;

  // Op implementation interface.
  Tensor emit(std::string_view op, std::vector<std::size_t> inputs, Shape shape,
              std::vector<double> value, BackwardFn backward);
  const Shape& shape_of(std::size_t id) const { return nodes_[id].shape; }
  std::span<const double> value_of(std::size_t id) const { return nodes_[id].value; }
  /// Gradient buffer of a tracked node; empty for untracked nodes.
  std::span<double> grad_of(std::size_t id) { return nodes_[id].grad; }
  std::span<const double> grad_of(std::size_t id) const { return nodes_[id].grad; }
  bool tracked(std::size_t id) const { return nodes_[id].requires_grad; }

 private:
  friend class Tensor;

  struct Node {
    std::string_view op;
    std::vector<std::size_t> inputs;
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    bool leaf = false;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
};

}  // namespace aquacast::ad
