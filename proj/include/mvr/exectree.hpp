#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvr/lineage.hpp"
#include "mvr/trace.hpp"
#include "mvr/types.hpp"

namespace mvr {

// Maximum allowed max/min ratios for two measurements of one state.
struct Tolerances {
  double cost_ratio = 2.0;
  double size_ratio = 2.0;
};

struct ExecNode {
  NodeId id = 0;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  Seconds delta = 0;
  Bytes size = 0;
  std::string code_hash;
  NormalizedLineage lineage;
  // Versions whose last cell is this node.
  std::vector<std::string> terminals;
};

// Trie of program versions. Node 0 is the environment state ps_0 (delta 0,
// size 0); every other node is a program state shared by one or more
// versions. Children are kept in creation order, which is also ascending id
// order.
class ExecTree {
 public:
  ExecTree();
  // Takes nodes as given; children lists are rebuilt from parent links in id
  // order. Used by loaders and by tests that hand-edit trees.
  static ExecTree from_nodes(std::vector<ExecNode> nodes,
                             std::vector<std::string> version_order = {});

  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return kRootId; }
  const ExecNode& node(NodeId id) const { return nodes_.at(id); }
  ExecNode& mutable_node(NodeId id) { return nodes_.at(id); }
  const std::vector<ExecNode>& nodes() const { return nodes_; }

  const std::vector<NodeId>& children(NodeId id) const {
    return nodes_[id].children;
  }
  NodeId parent(NodeId id) const { return nodes_[id].parent; }
  bool is_leaf(NodeId id) const { return nodes_[id].children.empty(); }
  bool is_terminal(NodeId id) const { return !nodes_[id].terminals.empty(); }

  NodeId add_node(NodeId parent, Seconds delta, Bytes size,
                  std::string code_hash, NormalizedLineage lineage);
  void mark_terminal(NodeId id, const std::string& version_id);

  // Versions in ingestion order.
  const std::vector<std::string>& versions() const { return versions_; }
  std::optional<NodeId> terminal_of(std::string_view version_id) const;

  Tolerances tolerances;

 private:
  std::vector<ExecNode> nodes_;
  std::vector<std::string> versions_;
  std::map<std::string, NodeId, std::less<>> version_index_;
};

// Structural facts shared by the planners. Valid for an unmodified tree.
struct TreeFacts {
  explicit TreeFacts(const ExecTree& tree);

  std::vector<std::size_t> depth;
  // Sum of delta from the root down to the node, inclusive.
  std::vector<Seconds> path_delta;
  // Number of nodes in the subtree rooted at the node, inclusive.
  std::vector<std::size_t> subtree_count;
  // Pre-order DFS with children in stored order.
  std::vector<NodeId> preorder;
  std::vector<NodeId> terminals;
  std::size_t height = 0;
  Seconds total_delta = 0;
  Bytes total_size = 0;
  // Largest sum of sizes along any root-to-node path.
  Bytes max_path_size = 0;
};

struct CellState {
  std::string code_hash;
  NormalizedLineage lineage;
  Seconds delta = 0;
  Bytes size = 0;
};

bool states_equal(const CellState& a, const CellState& b, const Tolerances& tol);

struct MergeOptions {
  Tolerances tolerances;
  // Representative delta/size of a shared node: first ingested trace wins
  // unless this is set, in which case the running mean is used.
  bool mean_aggregation = false;
};

struct MergeResult {
  ExecTree tree;
  std::vector<std::string> warnings;
};

// Throws InputError on mixed environments, duplicate version ids, empty
// traces or malformed events.
MergeResult merge_versions(std::span<const VersionTrace> traces,
                           const MergeOptions& options = {});

// Empty result means the tree satisfies every structural invariant.
std::vector<std::string> validate_tree(const ExecTree& tree);

// Cells along the root-to-terminal path of a version, root excluded.
std::vector<NodeId> version_path(const ExecTree& tree, NodeId terminal);

}  // namespace mvr
