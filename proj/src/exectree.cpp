#include "mvr/exectree.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace mvr {

ExecTree::ExecTree() {
  ExecNode root;
  root.id = kRootId;
  root.lineage = NormalizedLineage::empty();
  nodes_.push_back(std::move(root));
}

ExecTree ExecTree::from_nodes(std::vector<ExecNode> nodes,
                              std::vector<std::string> version_order) {
  ExecTree t;
  t.nodes_ = std::move(nodes);
  for (auto& n : t.nodes_) n.children.clear();
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    NodeId p = t.nodes_[i].parent;
    if (p != kNoNode && p < t.nodes_.size()) t.nodes_[p].children.push_back(i);
  }
  std::vector<std::string> seen;
  for (const auto& n : t.nodes_) {
    for (const auto& v : n.terminals) {
      t.version_index_.emplace(v, n.id);
      seen.push_back(v);
    }
  }
  for (const auto& v : version_order) {
    if (t.version_index_.contains(v) &&
        std::find(t.versions_.begin(), t.versions_.end(), v) == t.versions_.end()) {
      t.versions_.push_back(v);
    }
  }
  for (const auto& v : seen) {
    if (std::find(t.versions_.begin(), t.versions_.end(), v) == t.versions_.end()) {
      t.versions_.push_back(v);
    }
  }
  return t;
}

NodeId ExecTree::add_node(NodeId parent, Seconds delta, Bytes size,
                          std::string code_hash, NormalizedLineage lineage) {
  ExecNode n;
  n.id = nodes_.size();
  n.parent = parent;
  n.delta = delta;
  n.size = size;
  n.code_hash = std::move(code_hash);
  n.lineage = std::move(lineage);
  nodes_.push_back(std::move(n));
  nodes_[parent].children.push_back(nodes_.back().id);
  return nodes_.back().id;
}

void ExecTree::mark_terminal(NodeId id, const std::string& version_id) {
  auto& terms = nodes_.at(id).terminals;
  if (std::find(terms.begin(), terms.end(), version_id) == terms.end()) {
    terms.push_back(version_id);
  }
  if (version_index_.emplace(version_id, id).second) {
    versions_.push_back(version_id);
  }
}

std::optional<NodeId> ExecTree::terminal_of(std::string_view version_id) const {
  auto it = version_index_.find(version_id);
  if (it == version_index_.end()) return std::nullopt;
  return it->second;
}

TreeFacts::TreeFacts(const ExecTree& tree) {
  const std::size_t n = tree.size();
  depth.assign(n, 0);
  path_delta.assign(n, 0);
  subtree_count.assign(n, 1);
  std::vector<Bytes> path_size(n, 0);

  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    preorder.push_back(u);
    const auto& node = tree.node(u);
    if (u != tree.root()) {
      depth[u] = depth[node.parent] + 1;
      path_delta[u] = path_delta[node.parent] + node.delta;
      path_size[u] = path_size[node.parent] + node.size;
    } else {
      path_delta[u] = node.delta;
      path_size[u] = node.size;
    }
    height = std::max(height, depth[u]);
    max_path_size = std::max(max_path_size, path_size[u]);
    total_delta += node.delta;
    total_size += node.size;
    if (tree.is_terminal(u)) terminals.push_back(u);
    const auto& ch = node.children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  for (auto it = preorder.rbegin(); it != preorder.rend(); ++it) {
    NodeId u = *it;
    if (u != tree.root()) subtree_count[tree.parent(u)] += subtree_count[u];
  }
  std::sort(terminals.begin(), terminals.end());
}

namespace {

template <typename T>
bool ratio_within(T a, T b, double limit) {
  if (a == b) return true;
  if (a == 0 || b == 0) return false;
  const double hi = static_cast<double>(std::max(a, b));
  const double lo = static_cast<double>(std::min(a, b));
  return hi / lo <= limit;
}

}  // namespace

bool states_equal(const CellState& a, const CellState& b, const Tolerances& tol) {
  return a.code_hash == b.code_hash && lineage_equal(a.lineage, b.lineage) &&
         ratio_within(a.delta, b.delta, tol.cost_ratio) &&
         ratio_within(a.size, b.size, tol.size_ratio);
}

MergeResult merge_versions(std::span<const VersionTrace> traces,
                           const MergeOptions& options) {
  if (options.tolerances.cost_ratio < 1.0 || options.tolerances.size_ratio < 1.0) {
    throw InputError("tolerance ratios must be >= 1");
  }
  MergeResult result;
  if (traces.empty()) return result;

  std::set<std::string> ids;
  for (const auto& t : traces) {
    if (!ids.insert(t.version_id).second) {
      throw InputError("duplicate version_id '" + t.version_id + "'");
    }
    if (t.cells.empty()) {
      throw InputError("version '" + t.version_id + "' has no cells");
    }
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      if (!(t.cells[i].delta >= 0)) {
        throw InputError("version '" + t.version_id + "' cell " +
                         std::to_string(i) + ": negative delta");
      }
    }
  }
  const std::string& env = traces.front().environment_hash;
  std::vector<std::string> offending;
  for (const auto& t : traces) {
    if (t.environment_hash != env) offending.push_back(t.version_id);
  }
  if (!offending.empty()) {
    std::string msg = "mixed environment_hash (expected " + env +
                      " from version '" + traces.front().version_id +
                      "'); offending versions:";
    for (const auto& v : offending) msg += " " + v;
    throw InputError(msg);
  }

  ExecTree& tree = result.tree;
  tree.tolerances = options.tolerances;
  std::vector<std::size_t> samples(1, 0);
  std::map<NodeId, std::string> first_owner;

  for (const auto& trace : traces) {
    auto chain = lineage_chain(trace);
    NodeId cur = tree.root();
    for (std::size_t i = 0; i < trace.cells.size(); ++i) {
      const auto& cell = trace.cells[i];
      CellState incoming{cell.code_hash, chain[i], cell.delta, cell.size};
      NodeId next = kNoNode;
      for (NodeId c : tree.children(cur)) {
        const auto& cn = tree.node(c);
        CellState existing{cn.code_hash, cn.lineage, cn.delta, cn.size};
        if (states_equal(existing, incoming, options.tolerances)) {
          next = c;
          break;
        }
      }
      if (next == kNoNode) {
        next = tree.add_node(cur, cell.delta, cell.size, cell.code_hash, chain[i]);
        samples.push_back(1);
      } else if (options.mean_aggregation) {
        auto& node = tree.mutable_node(next);
        const double k = static_cast<double>(++samples[next]);
        node.delta += (cell.delta - node.delta) / k;
        const double sz = static_cast<double>(node.size) +
                          (static_cast<double>(cell.size) -
                           static_cast<double>(node.size)) / k;
        node.size = static_cast<Bytes>(sz + 0.5);
      }
      cur = next;
    }
    if (tree.is_terminal(cur)) {
      result.warnings.push_back("version '" + trace.version_id +
                                "' is indistinguishable from version '" +
                                tree.node(cur).terminals.front() + "'");
    }
    tree.mark_terminal(cur, trace.version_id);
  }
  return result;
}

std::vector<std::string> validate_tree(const ExecTree& tree) {
  std::vector<std::string> out;
  const std::size_t n = tree.size();
  if (n == 0) {
    out.push_back("tree has no root");
    return out;
  }
  const auto& root = tree.node(tree.root());
  if (root.parent != kNoNode) out.push_back("root has a parent");
  if (root.delta != 0 || root.size != 0) {
    out.push_back("root must have delta 0 and size 0");
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = tree.node(i);
    if (node.id != i) out.push_back("node " + std::to_string(i) + ": id mismatch");
    if (i != tree.root() && node.parent == kNoNode) {
      out.push_back("node " + std::to_string(i) + ": second root");
    }
    if (node.parent != kNoNode && node.parent >= n) {
      out.push_back("node " + std::to_string(i) + ": parent out of range");
    }
    if (!(node.delta >= 0)) {
      out.push_back("node " + std::to_string(i) + ": negative delta");
    }
    if (tree.is_leaf(i) && i != tree.root() && node.terminals.empty()) {
      out.push_back("node " + std::to_string(i) + ": leaf without terminal version");
    }
    std::set<std::pair<std::string, std::string>> keys;
    for (NodeId c : node.children) {
      const auto& cn = tree.node(c);
      if (!keys.emplace(cn.code_hash, cn.lineage.digest).second) {
        out.push_back("node " + std::to_string(i) + ": children share (code_hash, " +
                      "lineage) with node " + std::to_string(c));
      }
    }
  }

  // Reachability from the root; a node reached twice or never lies on a cycle
  // or in a detached component.
  std::vector<int> seen(n, 0);
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    if (seen[u]++) {
      out.push_back("node " + std::to_string(u) + ": reached twice");
      continue;
    }
    for (NodeId c : tree.children(u)) {
      if (c < n) stack.push_back(c);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) out.push_back("node " + std::to_string(i) + ": unreachable from root");
  }

  for (const auto& v : tree.versions()) {
    auto t = tree.terminal_of(v);
    if (!t || *t >= n) {
      out.push_back("version '" + v + "' has no terminal node");
      continue;
    }
    const auto& terms = tree.node(*t).terminals;
    if (std::find(terms.begin(), terms.end(), v) == terms.end()) {
      out.push_back("version '" + v + "' not marked on its terminal node");
    }
  }
  return out;
}

std::vector<NodeId> version_path(const ExecTree& tree, NodeId terminal) {
  std::vector<NodeId> path;
  for (NodeId u = terminal; u != tree.root() && u != kNoNode; u = tree.parent(u)) {
    path.push_back(u);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace mvr
