#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spinal/tensor.hpp"

namespace spinal {

/// The recorded computation reachable from one root tensor.
///
/// Nodes are held in recording order, so every node's operands precede it.
/// Leaves are the reachable tensors that require grad and have no history.
class Graph {
 public:
  struct Entry {
    const detail::Node* node;
    detail::TensorImpl* output;
  };

  static Graph collect(const Tensor& root);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<Tensor> leaves() const;

 private:
  std::vector<Entry> entries_;
  std::vector<detail::ImplPtr> leaves_;
};

struct BackwardStats {
  std::size_t nodes_visited = 0;
};

/// Accumulates d(loss)/d(leaf) into the grad slot of every leaf that requires
/// grad. Throws ContractError unless loss holds exactly one element. A loss
/// with no recorded history is a no-op.
BackwardStats backward(const Tensor& loss);

}  // namespace spinal
