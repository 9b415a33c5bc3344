#include <vector>

#include "mvr/planners.hpp"
#include "persistent_kernel.hpp"

namespace mvr {
namespace detail {

std::vector<char> membership(const ExecTree& tree, std::span<const NodeId> nodes) {
  std::vector<char> in_set(tree.size(), 0);
  for (NodeId u : nodes) {
    if (u >= tree.size()) throw InputError("cached node " + std::to_string(u) + " does not exist");
    if (u != tree.root()) in_set[u] = 1;
  }
  return in_set;
}

std::optional<Seconds> dfs_cost_masked(const ExecTree& tree, const TreeFacts& facts,
                                       const std::vector<char>& in_set, NodeId extra,
                                       Bytes budget) {
  const std::size_t n = tree.size();
  // used[u]: cached bytes on the root path of u; anchor[u]: path_delta of the
  // nearest cached ancestor-or-self (0 when none).
  std::vector<Bytes> used(n, 0);
  std::vector<Seconds> anchor(n, 0);
  Seconds cost = 0;
  for (NodeId u : facts.preorder) {
    if (u == tree.root()) continue;
    const auto& node = tree.node(u);
    const NodeId p = node.parent;
    const bool cached = in_set[u] || u == extra;
    used[u] = used[p] + (cached ? node.size : 0);
    if (cached && used[u] > budget) return std::nullopt;
    anchor[u] = cached ? facts.path_delta[u] : anchor[p];
    cost += node.delta;

    const auto& siblings = tree.children(p);
    const bool first_child = siblings.front() == u;
    const bool parent_cached = in_set[p] || p == extra;
    if (!first_child && p != tree.root() && !parent_cached) {
      cost += facts.path_delta[p] - anchor[p];
    }
  }
  return cost;
}

}  // namespace detail

std::optional<Seconds> dfs_cost(const ExecTree& tree, std::span<const NodeId> cached,
                                Bytes budget) {
  TreeFacts facts(tree);
  return detail::dfs_cost_masked(tree, facts, detail::membership(tree, cached), kNoNode,
                                 budget);
}

}  // namespace mvr
