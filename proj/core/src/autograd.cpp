#include "spinal/autograd.hpp"

#include <algorithm>
#include <unordered_set>

#include "spinal/errors.hpp"

namespace spinal {

Graph Graph::collect(const Tensor& root) {
  Graph g;
  std::unordered_set<const detail::TensorImpl*> seen;
  std::vector<detail::TensorImpl*> stack{root.impl().get()};
  std::vector<detail::ImplPtr> leaf_candidates;
  if (root.is_leaf() && root.requires_grad()) g.leaves_.push_back(root.impl());
  seen.insert(root.impl().get());
  while (!stack.empty()) {
    auto* impl = stack.back();
    stack.pop_back();
    if (!impl->grad_fn) continue;
    g.entries_.push_back({impl->grad_fn.get(), impl});
    for (const auto& in : impl->grad_fn->inputs) {
      if (!seen.insert(in.get()).second) continue;
      if (in->grad_fn) {
        stack.push_back(in.get());
      } else if (in->requires_grad) {
        g.leaves_.push_back(in);
      }
    }
  }
  std::sort(g.entries_.begin(), g.entries_.end(),
            [](const Entry& a, const Entry& b) { return a.node->sequence < b.node->sequence; });
  return g;
}

std::vector<Tensor> Graph::leaves() const {
  std::vector<Tensor> out;
  out.reserve(leaves_.size());
  for (const auto& l : leaves_) out.emplace_back(l);
  return out;
}

BackwardStats backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " + to_string(loss.shape()));
  }
  BackwardStats stats;
  if (!loss.requires_grad()) return stats;
  detail::ensure_grad(*loss.impl())[0] += 1.0;
  if (loss.is_leaf()) return stats;

  const Graph graph = Graph::collect(loss);
  const auto entries = graph.entries();
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    ++stats.nodes_visited;
    auto* out = it->output;
    if (out->grad.empty()) continue;
    it->node->backward(out->grad, it->node->inputs);
    // Interior gradients are consumed exactly once.
    out->grad.clear();
    out->grad.shrink_to_fit();
  }
  return stats;
}

}  // namespace spinal
