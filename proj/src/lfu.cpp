#include <algorithm>
#include <limits>

#include "mvr/planners.hpp"

namespace mvr {

namespace {

class LfuCache {
 public:
  LfuCache(const ExecTree& tree, Bytes budget)
      : tree_(tree), facts_(tree), budget_(budget), freq_(tree.size(), 0),
        cached_(tree.size(), 0) {}

  ReplaySequence run() {
    for (const auto& version : tree_.versions()) replay_version(*tree_.terminal_of(version));
    return std::move(seq_);
  }

 private:
  void replay_version(NodeId terminal) {
    if (cached_[terminal]) {
      ++freq_[terminal];
      return;
    }
    const auto path = version_path(tree_, terminal);
    std::size_t start = 0;
    for (std::size_t k = path.size(); k-- > 0;) {
      if (cached_[path[k]]) {
        seq_.ops.push_back(ReplayOp::rs(path[k], path[k + 1]));
        ++freq_[path[k]];
        start = k + 1;
        break;
      }
    }
    for (std::size_t k = start; k < path.size(); ++k) {
      seq_.ops.push_back(ReplayOp::ct(path[k]));
      ++freq_[path[k]];
      admit(path[k]);
    }
  }

  double score(NodeId u) const {
    const Bytes sz = tree_.node(u).size;
    const double weight =
        static_cast<double>(freq_[u]) * static_cast<double>(facts_.subtree_count[u]);
    return sz == 0 ? std::numeric_limits<double>::infinity()
                   : weight / static_cast<double>(sz);
  }

  void admit(NodeId x) {
    const Bytes sz = tree_.node(x).size;
    if (sz > budget_) return;
    if (bytes_ + sz <= budget_) {
      checkpoint(x);
      return;
    }
    const double candidate = score(x);
    std::vector<NodeId> members;
    for (NodeId u = 0; u < tree_.size(); ++u) {
      if (cached_[u]) members.push_back(u);
    }
    std::stable_sort(members.begin(), members.end(),
                     [&](NodeId a, NodeId b) { return score(a) < score(b); });
    std::vector<NodeId> victims;
    Bytes freed = 0;
    for (NodeId v : members) {
      if (bytes_ - freed + sz <= budget_) break;
      if (!(score(v) < candidate)) return;
      victims.push_back(v);
      freed += tree_.node(v).size;
    }
    if (bytes_ - freed + sz > budget_) return;
    for (NodeId v : victims) {
      seq_.ops.push_back(ReplayOp::ev(v));
      cached_[v] = 0;
      bytes_ -= tree_.node(v).size;
    }
    checkpoint(x);
  }

  void checkpoint(NodeId x) {
    seq_.ops.push_back(ReplayOp::cp(x));
    cached_[x] = 1;
    bytes_ += tree_.node(x).size;
  }

  const ExecTree& tree_;
  TreeFacts facts_;
  Bytes budget_;
  std::vector<std::uint64_t> freq_;
  std::vector<char> cached_;
  Bytes bytes_ = 0;
  ReplaySequence seq_;
};

}  // namespace

PlanReport lfu_plan(const ExecTree& tree, Bytes budget) {
  return make_report(tree, "lfu", budget, LfuCache(tree, budget).run());
}

}  // namespace mvr
