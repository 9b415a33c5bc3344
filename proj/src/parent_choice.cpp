#include <bit>
#include <unordered_map>

#include "mvr/planners.hpp"

namespace mvr {

namespace {

// Cached ancestors are encoded as a bitmask over depths: bit d set means the
// ancestor at depth d is cached. The root (depth 0) is never cached.
using AncestorMask = std::uint64_t;

constexpr std::size_t kMaxHeight = 63;

struct Entry {
  Seconds cost = 0;
  bool cache_node = false;
  std::vector<char> with_parent;  // per child, in child order
};

class ParentChoice {
 public:
  ParentChoice(const ExecTree& tree, Bytes budget)
      : tree_(tree), facts_(tree), budget_(budget), memo_(tree.size()),
        ancestors_(tree.size()) {
    if (facts_.height > kMaxHeight) {
      throw InputError("parent choice supports trees of height <= 63, got " +
                       std::to_string(facts_.height));
    }
    for (NodeId u : facts_.preorder) {
      if (u == tree.root()) continue;
      ancestors_[u] = ancestors_[tree.parent(u)];
      ancestors_[u].push_back(tree.parent(u));
    }
  }

  Seconds total() { return tree_.node(tree_.root()).delta + cost(tree_.root(), 0, 0); }

  AncestorMask mask_of(NodeId u, std::span<const NodeId> cached) const {
    AncestorMask m = 0;
    for (NodeId a : cached) {
      const auto& anc = ancestors_[u];
      bool found = false;
      for (std::size_t d = 1; d < anc.size(); ++d) {
        if (anc[d] == a) {
          m |= AncestorMask{1} << d;
          found = true;
        }
      }
      if (!found) {
        throw InputError("node " + std::to_string(a) + " is not a proper non-root ancestor of " +
                         std::to_string(u));
      }
    }
    return m;
  }

  Bytes used_by(NodeId u, AncestorMask mask) const {
    Bytes used = 0;
    for (std::size_t d = 1; d < ancestors_[u].size(); ++d) {
      if (mask >> d & 1) used += tree_.node(ancestors_[u][d]).size;
    }
    return used;
  }

  // Cost of replaying the subtree below u, u in working memory, with exactly
  // the ancestors in `mask` cached (occupying `used` bytes).
  Seconds cost(NodeId u, AncestorMask mask, Bytes used) {
    const auto& ch = tree_.children(u);
    if (ch.empty()) return 0;
    if (auto it = memo_[u].find(mask); it != memo_[u].end()) return it->second.cost;

    const Seconds rp = reestablish_cost(u, mask);
    Seconds plain = 0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      plain += (i ? rp : 0) + tree_.node(ch[i]).delta + cost(ch[i], mask, used);
    }

    Entry e;
    e.cost = plain;
    const Bytes sz = tree_.node(u).size;
    if (u != tree_.root() && used + sz <= budget_) {
      const AncestorMask with_u = mask | AncestorMask{1} << facts_.depth[u];
      Seconds cached = 0;
      std::vector<char> part(ch.size(), 0);
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const Seconds dv = tree_.node(ch[i]).delta;
        const Seconds with = dv + cost(ch[i], with_u, used + sz);
        const Seconds without = rp + dv + cost(ch[i], mask, used);
        part[i] = cost_leq(with, without);
        cached += part[i] ? with : without;
      }
      // Ties keep the node uncached.
      if (cost_less(cached, plain)) {
        e.cost = cached;
        e.cache_node = true;
        e.with_parent = std::move(part);
      }
    }
    const Seconds c = e.cost;
    memo_[u].emplace(mask, std::move(e));
    return c;
  }

  const Entry* entry(NodeId u, AncestorMask mask) const {
    auto it = memo_[u].find(mask);
    return it == memo_[u].end() ? nullptr : &it->second;
  }

  ReplaySequence extract() {
    ReplaySequence seq;
    emit_subtree(seq, tree_.root(), 0);
    return seq;
  }

 private:
  // Sum of delta from the nearest cached ancestor (exclusive) down to u.
  Seconds reestablish_cost(NodeId u, AncestorMask mask) const {
    if (mask == 0) return facts_.path_delta[u];
    const std::size_t d = 63 - std::countl_zero(mask);
    return facts_.path_delta[u] - facts_.path_delta[ancestors_[u][d]];
  }

  void reestablish(ReplaySequence& seq, NodeId u, AncestorMask mask) const {
    if (u == tree_.root()) return;
    const auto& anc = ancestors_[u];
    std::size_t from = 1;
    if (mask != 0) {
      const std::size_t d = 63 - std::countl_zero(mask);
      from = d + 1;
      const NodeId next = from < anc.size() ? anc[from] : u;
      seq.ops.push_back(ReplayOp::rs(anc[d], next));
    }
    for (std::size_t k = from; k < anc.size(); ++k) seq.ops.push_back(ReplayOp::ct(anc[k]));
    seq.ops.push_back(ReplayOp::ct(u));
  }

  // u is in working memory.
  void emit_subtree(ReplaySequence& seq, NodeId u, AncestorMask mask) {
    const auto& ch = tree_.children(u);
    if (ch.empty()) return;
    const Entry* e = entry(u, mask);
    if (e == nullptr) {
      cost(u, mask, used_by(u, mask));
      e = entry(u, mask);
    }
    if (!e->cache_node) {
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (i > 0) reestablish(seq, u, mask);
        seq.ops.push_back(ReplayOp::ct(ch[i]));
        emit_subtree(seq, ch[i], mask);
      }
      return;
    }
    const AncestorMask with_u = mask | AncestorMask{1} << facts_.depth[u];
    const std::vector<char> part = e->with_parent;
    seq.ops.push_back(ReplayOp::cp(u));
    bool first = true;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (!part[i]) continue;
      if (!first) seq.ops.push_back(ReplayOp::rs(u, ch[i]));
      first = false;
      seq.ops.push_back(ReplayOp::ct(ch[i]));
      emit_subtree(seq, ch[i], with_u);
    }
    seq.ops.push_back(ReplayOp::ev(u));
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (part[i]) continue;
      reestablish(seq, u, mask);
      seq.ops.push_back(ReplayOp::ct(ch[i]));
      emit_subtree(seq, ch[i], mask);
    }
  }

  const ExecTree& tree_;
  TreeFacts facts_;
  Bytes budget_;
  std::vector<std::unordered_map<AncestorMask, Entry>> memo_;
  // ancestors_[u][d] is u's ancestor at depth d (root at 0), u excluded.
  std::vector<std::vector<NodeId>> ancestors_;
};

}  // namespace

PlanReport pc_plan(const ExecTree& tree, Bytes budget) {
  ParentChoice pc(tree, budget);
  const Seconds predicted = pc.total();
  ReplaySequence seq = pc.extract();
  return make_report(tree, "pc", budget, std::move(seq), predicted);
}

ParentChoiceDecision pc_decision(const ExecTree& tree, Bytes budget, NodeId node,
                                 std::span<const NodeId> cached_ancestors) {
  ParentChoice pc(tree, budget);
  const AncestorMask mask = pc.mask_of(node, cached_ancestors);
  pc.cost(node, mask, pc.used_by(node, mask));
  ParentChoiceDecision d;
  const auto& ch = tree.children(node);
  const Entry* e = pc.entry(node, mask);
  if (e == nullptr) return d;  // leaf
  d.cache_node = e->cache_node;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (d.cache_node && e->with_parent[i]) {
      d.with_parent.push_back(ch[i]);
    } else {
      d.without_parent.push_back(ch[i]);
    }
  }
  return d;
}

}  // namespace mvr
