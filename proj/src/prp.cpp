#include <limits>

#include "mvr/planners.hpp"
#include "persistent_kernel.hpp"

namespace mvr {

namespace {

constexpr Seconds kInfeasible = std::numeric_limits<Seconds>::infinity();

// Cost of adding each candidate to the current set; infinity when infeasible
// or already a member.
std::vector<Seconds> scan_candidates(const ExecTree& tree, const TreeFacts& facts,
                                     const std::vector<char>& in_set, Bytes budget,
                                     Execution exec) {
  const std::size_t n = tree.size();
  std::vector<Seconds> costs(n, kInfeasible);
  auto eval = [&](NodeId u) {
    if (u == tree.root() || in_set[u]) return;
    if (auto c = detail::dfs_cost_masked(tree, facts, in_set, u, budget)) costs[u] = *c;
  };
  if (exec == Execution::parallel) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) eval(static_cast<NodeId>(i));
  } else {
    for (NodeId u = 0; u < n; ++u) eval(u);
  }
  return costs;
}

}  // namespace

PrpSelection prp_select(const ExecTree& tree, Bytes budget, PrpVariant variant,
                        Execution exec) {
  TreeFacts facts(tree);
  std::vector<char> in_set(tree.size(), 0);
  PrpSelection sel;
  Seconds current = *detail::dfs_cost_masked(tree, facts, in_set, kNoNode, budget);
  sel.cost_trace.push_back(current);

  while (true) {
    auto costs = scan_candidates(tree, facts, in_set, budget, exec);
    NodeId best = kNoNode;
    double best_score = 0;
    for (NodeId u = 0; u < costs.size(); ++u) {
      if (costs[u] == kInfeasible || !cost_less(costs[u], current)) continue;
      double score = 0;
      if (variant == PrpVariant::v1) {
        score = -costs[u];
      } else {
        const Bytes sz = tree.node(u).size;
        score = sz == 0 ? std::numeric_limits<double>::infinity()
                        : (current - costs[u]) / static_cast<double>(sz);
      }
      // Strict comparison keeps the lowest id on ties.
      if (best == kNoNode || score > best_score) {
        best = u;
        best_score = score;
      }
    }
    if (best == kNoNode) break;
    in_set[best] = 1;
    sel.cached.push_back(best);
    current = costs[best];
    sel.cost_trace.push_back(current);
  }
  return sel;
}

PlanReport prp_plan(const ExecTree& tree, Bytes budget, PrpVariant variant,
                    Execution exec) {
  PrpSelection sel = prp_select(tree, budget, variant, exec);
  ReplaySequence seq = materialize_persistent(tree, sel.cached, budget);
  return make_report(tree, variant == PrpVariant::v1 ? "prp1" : "prp2", budget,
                     std::move(seq), sel.cost_trace.back());
}

}  // namespace mvr
