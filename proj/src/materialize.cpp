#include <algorithm>
#include <deque>

#include "mvr/planners.hpp"
#include "persistent_kernel.hpp"

namespace mvr {

namespace {

class PersistentEmitter {
 public:
  PersistentEmitter(const ExecTree& tree, std::vector<char> in_set, Bytes budget)
      : tree_(tree), in_set_(std::move(in_set)), budget_(budget),
        cached_(tree.size(), 0) {}

  ReplaySequence run() {
    const auto& top = tree_.children(tree_.root());
    for (NodeId v : top) visit(v);
    return std::move(seq_);
  }

 private:
  // Working memory holds parent(u), or a restore of parent(u) was just
  // emitted.
  void visit(NodeId u) {
    emit(ReplayOp::ct(u));
    if (in_set_[u]) {
      const Bytes need = tree_.node(u).size;
      while (bytes_ + need > budget_ && !finished_.empty()) {
        NodeId victim = finished_.front();
        finished_.pop_front();
        emit(ReplayOp::ev(victim));
        cached_[victim] = 0;
        bytes_ -= tree_.node(victim).size;
      }
      emit(ReplayOp::cp(u));
      cached_[u] = 1;
      bytes_ += need;
    }
    const auto& ch = tree_.children(u);
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (i > 0) reestablish(u, ch[i]);
      visit(ch[i]);
    }
    if (in_set_[u]) finished_.push_back(u);
  }

  // Brings u back into working memory so that `next` can be computed.
  void reestablish(NodeId u, NodeId next) {
    if (in_set_[u]) {
      emit(ReplayOp::rs(u, next));
      return;
    }
    std::vector<NodeId> helper;
    NodeId a = u;
    while (a != tree_.root() && !in_set_[a]) {
      helper.push_back(a);
      a = tree_.parent(a);
    }
    std::reverse(helper.begin(), helper.end());
    if (a != tree_.root()) emit(ReplayOp::rs(a, helper.front()));
    for (NodeId h : helper) emit(ReplayOp::ct(h));
  }

  void emit(ReplayOp op) { seq_.ops.push_back(op); }

  const ExecTree& tree_;
  std::vector<char> in_set_;
  Bytes budget_;
  std::vector<char> cached_;
  Bytes bytes_ = 0;
  std::deque<NodeId> finished_;
  ReplaySequence seq_;
};

}  // namespace

ReplaySequence materialize_persistent(const ExecTree& tree,
                                      std::span<const NodeId> cached, Bytes budget) {
  auto in_set = detail::membership(tree, cached);
  TreeFacts facts(tree);
  if (!detail::dfs_cost_masked(tree, facts, in_set, kNoNode, budget)) {
    throw InputError("cached set exceeds the budget on some root path");
  }
  return PersistentEmitter(tree, std::move(in_set), budget).run();
}

}  // namespace mvr
