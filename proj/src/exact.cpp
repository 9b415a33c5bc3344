#include <algorithm>
#include <bit>
#include <queue>
#include <unordered_map>

#include "mvr/planners.hpp"

namespace mvr {

namespace {

using Mask = std::uint64_t;

struct State {
  NodeId working = kRootId;
  Mask cache = 0;
  Mask done = 0;  // completed terminals, by terminal index

  friend bool operator==(const State&, const State&) = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept {
    std::uint64_t h = s.cache * 0x9e3779b97f4a7c15ULL;
    h ^= (s.done + 0x632be59bd9b4e019ULL) * 0xc2b2ae3d27d4eb4fULL;
    h ^= static_cast<std::uint64_t>(s.working) * 0x165667b19e3779f9ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

// The move from the parent record: optional RS(from, node), CT(node), EVs of
// `evicted` (smallest first), then CP(node) if `checkpoint`.
struct Record {
  State state;
  Seconds g = 0;
  std::size_t parent = 0;
  NodeId node = kNoNode;
  NodeId from = kNoNode;
  Mask evicted = 0;
  bool checkpoint = false;
};

struct Frontier {
  Seconds f;
  Seconds g;
  std::size_t order;
  std::size_t record;
  // Equal f: deeper states first (reaches goals on a plateau without
  // sweeping it), then insertion order.
  bool operator>(const Frontier& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;
    return order > o.order;
  }
};

class ExactSearch {
 public:
  ExactSearch(const ExecTree& tree, Bytes budget, const ExactLimits& limits)
      : tree_(tree), budget_(budget), limits_(limits), term_index_(tree.size(), -1) {
    for (NodeId u = 0; u < tree.size(); ++u) {
      if (tree.is_terminal(u)) {
        term_index_[u] = static_cast<int>(terminals_.size());
        terminals_.push_back(u);
      }
    }
    all_done_ = terminals_.size() == 64 ? ~Mask{0} : (Mask{1} << terminals_.size()) - 1;
  }

  ExactOutcome run() {
    ExactOutcome out;
    if (tree_.size() - 1 > limits_.max_nodes || tree_.size() > 64) {
      out.unavailable_reason = "oracle unavailable: tree has " +
                               std::to_string(tree_.size() - 1) + " nodes, limit " +
                               std::to_string(std::min<std::size_t>(limits_.max_nodes, 63));
      return out;
    }
    if (terminals_.size() > 64) {
      out.unavailable_reason = "oracle unavailable: more than 64 terminals";
      return out;
    }

    push(Record{});
    while (!open_.empty()) {
      Frontier top = open_.top();
      open_.pop();
      const Record& rec = records_[top.record];
      if (best_.at(rec.state) != top.record) continue;  // stale
      if (rec.state.done == all_done_) {
        out.plan = make_report(tree_, "exact", budget_, rebuild(top.record));
        out.plan->predicted_cost = rec.g;
        out.expansions = expansions_;
        return out;
      }
      if (++expansions_ > limits_.max_expansions) {
        out.unavailable_reason = "oracle unavailable: exceeded " +
                                 std::to_string(limits_.max_expansions) + " expansions";
        out.expansions = expansions_;
        return out;
      }
      expand(top.record);
      // A truncated expansion leaves the frontier incomplete, so no later
      // goal would be provably optimal.
      if (stop_) {
        out.unavailable_reason = "oracle unavailable: exceeded " +
                                 std::to_string(limits_.max_states) + " generated states";
        out.expansions = expansions_;
        return out;
      }
    }
    out.unavailable_reason = "oracle unavailable: no complete sequence exists";
    out.expansions = expansions_;
    return out;
  }

 private:
  Bytes cache_bytes(Mask cache) const {
    Bytes b = 0;
    for (Mask m = cache; m; m &= m - 1) b += tree_.node(std::countr_zero(m)).size;
    return b;
  }

  void expand(std::size_t idx) {
    const State s = records_[idx].state;
    const Seconds g = records_[idx].g;
    auto try_child = [&](NodeId from_cache, NodeId x) {
      if (s.cache >> x & 1) return;
      State next{x, s.cache, s.done};
      if (term_index_[x] >= 0) next.done |= Mask{1} << term_index_[x];
      const Seconds g2 = g + tree_.node(x).delta;
      const Bytes sz = tree_.node(x).size;
      const Bytes held = cache_bytes(s.cache);
      const Record base{next, g2, idx, x, from_cache, 0, false};
      if (sz <= budget_ && held + sz <= budget_) {
        // Free space: keeping x is never worse, it can be evicted later.
        Record r = base;
        r.state.cache |= Mask{1} << x;
        r.checkpoint = true;
        push(r);
        return;
      }
      push(base);
      if (sz > budget_) return;
      // Inclusion-minimal eviction sets that make room for x, enumerated
      // largest member first so a set is complete as soon as it frees enough.
      std::vector<NodeId> members;
      for (Mask m = s.cache; m; m &= m - 1) members.push_back(std::countr_zero(m));
      std::stable_sort(members.begin(), members.end(), [&](NodeId a, NodeId b) {
        return tree_.node(a).size > tree_.node(b).size;
      });
      std::vector<Bytes> suffix(members.size() + 1, 0);
      for (std::size_t i = members.size(); i-- > 0;) {
        suffix[i] = suffix[i + 1] + tree_.node(members[i]).size;
      }
      const Bytes need = held + sz - budget_;
      auto pick = [&](auto& self, std::size_t i, Mask victims, Bytes freed) -> void {
        if (stop_) return;
        if (freed >= need) {
          Record r = base;
          r.state.cache = (s.cache & ~victims) | Mask{1} << x;
          r.evicted = victims;
          r.checkpoint = true;
          push(r);
          return;
        }
        if (i == members.size() || freed + suffix[i] < need) return;
        // Completed sets are minimal: the member added last is the smallest
        // and the set fell short without it.
        self(self, i + 1, victims | Mask{1} << members[i], freed + tree_.node(members[i]).size);
        self(self, i + 1, victims, freed);
      };
      pick(pick, 0, 0, 0);
    };

    for (NodeId x : tree_.children(tree_.root())) try_child(kNoNode, x);
    if (s.working != tree_.root()) {
      for (NodeId x : tree_.children(s.working)) try_child(kNoNode, x);
    }
    for (Mask m = s.cache; m; m &= m - 1) {
      const NodeId c = std::countr_zero(m);
      if (c == s.working) continue;  // direct continuation is the same move
      for (NodeId x : tree_.children(c)) try_child(c, x);
    }
  }

  // Sum of delta over nodes that must still be computed: for every open
  // terminal, the path below its deepest cached-or-working ancestor.
  Seconds lower_bound(const State& s) {
    if (!limits_.lower_bound) return 0;
    ++stamp_;
    if (mark_.size() != tree_.size()) mark_.assign(tree_.size(), 0);
    Seconds h = 0;
    for (std::size_t i = 0; i < terminals_.size(); ++i) {
      if (s.done >> i & 1) continue;
      for (NodeId u = terminals_[i]; u != tree_.root(); u = tree_.parent(u)) {
        if ((s.cache >> u & 1) || u == s.working) break;
        if (mark_[u] == stamp_) break;
        mark_[u] = stamp_;
        h += tree_.node(u).delta;
      }
    }
    return h;
  }

  void push(const Record& r) {
    if (++generated_ > limits_.max_states) {
      stop_ = true;
      return;
    }
    auto it = best_.find(r.state);
    if (it != best_.end() && !(r.g < records_[it->second].g - kCostEpsilon)) return;
    const std::size_t idx = records_.size();
    records_.push_back(r);
    best_[r.state] = idx;
    open_.push(Frontier{r.g + lower_bound(r.state), r.g, order_++, idx});
  }

  ReplaySequence rebuild(std::size_t idx) const {
    std::vector<const Record*> chain;
    for (std::size_t i = idx; i != 0; i = records_[i].parent) chain.push_back(&records_[i]);
    ReplaySequence seq;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const Record& r = **it;
      if (r.from != kNoNode) seq.ops.push_back(ReplayOp::rs(r.from, r.node));
      seq.ops.push_back(ReplayOp::ct(r.node));
      std::vector<NodeId> victims;
      for (Mask m = r.evicted; m; m &= m - 1) victims.push_back(std::countr_zero(m));
      std::stable_sort(victims.begin(), victims.end(), [&](NodeId a, NodeId b) {
        return tree_.node(a).size < tree_.node(b).size;
      });
      for (NodeId v : victims) seq.ops.push_back(ReplayOp::ev(v));
      if (r.checkpoint) seq.ops.push_back(ReplayOp::cp(r.node));
    }
    return seq;
  }

  const ExecTree& tree_;
  Bytes budget_;
  ExactLimits limits_;
  std::vector<int> term_index_;
  std::vector<NodeId> terminals_;
  Mask all_done_ = 0;
  std::vector<Record> records_;
  std::unordered_map<State, std::size_t, StateHash> best_;
  std::priority_queue<Frontier, std::vector<Frontier>, std::greater<>> open_;
  std::size_t order_ = 0;
  std::size_t expansions_ = 0;
  std::size_t generated_ = 0;
  bool stop_ = false;  // state limit hit mid-expansion
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
};

}  // namespace

ExactOutcome exact_plan(const ExecTree& tree, Bytes budget, const ExactLimits& limits) {
  return ExactSearch(tree, budget, limits).run();
}

}  // namespace mvr
