#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvr/exectree.hpp"
#include "mvr/replay.hpp"
#include "mvr/types.hpp"

namespace mvr {

// Serial kernels are the reference the parallel ones are tested against.
enum class Execution { serial, parallel };

// ---------------------------------------------------------------------------
// Persistent-root policy: a node in the cached set is checkpointed when first
// computed and stays cached until its whole subtree has been replayed.

// Cost of the DFS replay that caches exactly `cached` under the persistent
// policy, or nullopt when some cached node's root path holds more cached bytes
// than `budget`. Every node is computed once; a non-first child additionally
// pays for re-establishing its parent from the nearest cached ancestor unless
// the parent itself is cached. The root is the environment and is ignored if
// present in `cached`.
std::optional<Seconds> dfs_cost(const ExecTree& tree, std::span<const NodeId> cached,
                                Bytes budget);

// The canonical DFS sequence realizing dfs_cost. Checkpoints whose subtree is
// finished stay cached until space is needed. Throws InputError when `cached`
// is infeasible.
ReplaySequence materialize_persistent(const ExecTree& tree,
                                      std::span<const NodeId> cached, Bytes budget);

enum class PrpVariant {
  v1,  // pick the candidate with the lowest resulting cost
  v2,  // pick the candidate with the largest cost reduction per byte
};

struct PrpSelection {
  std::vector<NodeId> cached;  // in selection order
  // dfs_cost before the first round and after each accepted round.
  std::vector<Seconds> cost_trace;
};

PrpSelection prp_select(const ExecTree& tree, Bytes budget, PrpVariant variant,
                        Execution exec = Execution::parallel);
PlanReport prp_plan(const ExecTree& tree, Bytes budget, PrpVariant variant,
                    Execution exec = Execution::parallel);

// ---------------------------------------------------------------------------
// Parent choice: for every node, decide whether to cache it and which of its
// children are replayed while it is cached. Exponential in the tree height
// only; trees taller than 63 are rejected.

struct ParentChoiceDecision {
  bool cache_node = false;
  std::vector<NodeId> with_parent;     // replayed first, node cached
  std::vector<NodeId> without_parent;  // replayed after the node is evicted
};

PlanReport pc_plan(const ExecTree& tree, Bytes budget);

// Decision the PC planner takes at `node` when exactly `cached_ancestors` are
// cached above it.
ParentChoiceDecision pc_decision(const ExecTree& tree, Bytes budget, NodeId node,
                                 std::span<const NodeId> cached_ancestors);

// ---------------------------------------------------------------------------
// LFU baseline: versions replayed one at a time; every computed cell is
// admitted while space remains, later admissions evict strictly lower
// frequency * subtree-count / size scores.

PlanReport lfu_plan(const ExecTree& tree, Bytes budget);

// ---------------------------------------------------------------------------
// Exhaustive minimum-cost search over replay sequences.

struct ExactLimits {
  std::size_t max_nodes = 40;  // non-root nodes
  std::size_t max_expansions = 2'000'000;
  // Successor states generated, duplicates included; bounds time and memory.
  std::size_t max_states = 4'000'000;
  // Prune with an admissible lower bound (A*); false gives plain uniform-cost
  // search.
  bool lower_bound = true;
};

struct ExactOutcome {
  std::optional<PlanReport> plan;
  std::string unavailable_reason;  // set iff plan is empty
  std::size_t expansions = 0;

  bool available() const { return plan.has_value(); }
};

ExactOutcome exact_plan(const ExecTree& tree, Bytes budget, const ExactLimits& limits = {});

// ---------------------------------------------------------------------------

enum class Algorithm { prp1, prp2, pc, lfu, exact };

std::string_view algorithm_name(Algorithm a);
// Throws InputError for names other than prp1, prp2, pc, lfu and exact.
Algorithm parse_algorithm(std::string_view name);

class OracleUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws OracleUnavailable when the exact search declines.
PlanReport run_planner(const ExecTree& tree, Algorithm algorithm, Bytes budget,
                       const ExactLimits& limits = {},
                       Execution exec = Execution::parallel);

}  // namespace mvr
