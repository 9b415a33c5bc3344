#include "mvr/replay.hpp"

#include <algorithm>
#include <sstream>

namespace mvr {

std::string_view op_code(OpKind kind) {
  switch (kind) {
    case OpKind::compute: return "CT";
    case OpKind::checkpoint: return "CP";
    case OpKind::restore: return "RS";
    case OpKind::evict: return "EV";
  }
  return "??";
}

OpKind parse_op_code(std::string_view code) {
  if (code == "CT") return OpKind::compute;
  if (code == "CP") return OpKind::checkpoint;
  if (code == "RS") return OpKind::restore;
  if (code == "EV") return OpKind::evict;
  throw InputError("unknown op '" + std::string(code) + "'");
}

std::string to_string(const ReplayOp& op) {
  std::string s(op_code(op.kind));
  s += '(' + std::to_string(op.node);
  if (op.kind == OpKind::restore) s += ',' + std::to_string(op.child);
  s += ')';
  return s;
}

std::string to_string(const Violation& v) {
  std::ostringstream os;
  os << "step " << v.step << ": constraint (" << static_cast<int>(v.constraint)
     << ") " << v.message;
  return os.str();
}

InvalidSequence::InvalidSequence(std::vector<Violation> violations)
    : std::runtime_error(violations.empty()
                             ? std::string("invalid replay sequence")
                             : "invalid replay sequence: " + to_string(violations.front())),
      violations_(std::move(violations)) {}

std::vector<Violation> validate_sequence(const ExecTree& tree, Bytes budget,
                                         const ReplaySequence& seq,
                                         const ValidateOptions& options) {
  std::vector<Violation> out;
  const std::size_t n = tree.size();
  std::vector<char> cached(n, 0);
  std::vector<char> computed(n, 0);
  Bytes bytes = 0;
  NodeId working = tree.root();
  NodeId pending_child = kNoNode;
  NodeId checkpointable = kNoNode;

  auto flag = [&](std::size_t step, Constraint c, std::string msg) {
    out.push_back({step, c, std::move(msg)});
  };

  for (std::size_t i = 0; i < seq.ops.size(); ++i) {
    const ReplayOp& op = seq.ops[i];
    const std::string name = to_string(op);
    if (op.node >= n || (op.kind == OpKind::restore && op.child >= n)) {
      flag(i, Constraint::reference, name + " names an unknown node");
      checkpointable = kNoNode;
      pending_child = kNoNode;
      continue;
    }
    if (pending_child != kNoNode) {
      if (op.kind != OpKind::compute || op.node != pending_child) {
        flag(i, Constraint::restore,
             "restore must be followed by CT(" + std::to_string(pending_child) + ")");
      }
      pending_child = kNoNode;
    }

    switch (op.kind) {
      case OpKind::compute: {
        const NodeId u = op.node;
        if (u != tree.root()) {
          const NodeId p = tree.parent(u);
          if (p != tree.root() && working != p) {
            flag(i, Constraint::compute,
                 name + " does not continue from its parent " + std::to_string(p));
          }
        }
        if (cached[u]) flag(i, Constraint::minimality, name + " recomputes a cached node");
        working = u;
        computed[u] = 1;
        checkpointable = u;
        break;
      }
      case OpKind::checkpoint: {
        const NodeId u = op.node;
        if (checkpointable != u) {
          flag(i, Constraint::checkpoint, name + " does not follow CT(" +
                                              std::to_string(u) + ")");
        }
        checkpointable = kNoNode;
        if (cached[u]) {
          flag(i, Constraint::minimality, name + " checkpoints a cached node");
          break;
        }
        cached[u] = 1;
        bytes += tree.node(u).size;
        if (options.check_budget && bytes > budget) {
          flag(i, Constraint::budget, "cache holds " + std::to_string(bytes) +
                                          " bytes, budget " + std::to_string(budget));
        }
        break;
      }
      case OpKind::restore: {
        const NodeId u = op.node;
        if (tree.parent(op.child) != u || op.child == tree.root()) {
          flag(i, Constraint::restore,
               name + ": " + std::to_string(op.child) + " is not a child of " +
                   std::to_string(u));
        }
        if (!cached[u]) flag(i, Constraint::restore, name + " restores an uncached node");
        working = u;
        pending_child = op.child;
        checkpointable = kNoNode;
        break;
      }
      case OpKind::evict: {
        const NodeId u = op.node;
        if (!cached[u]) {
          flag(i, Constraint::evict, name + " evicts an uncached node");
          break;
        }
        cached[u] = 0;
        bytes -= tree.node(u).size;
        break;
      }
    }
  }
  if (pending_child != kNoNode) {
    flag(seq.ops.size(), Constraint::restore, "sequence ends right after a restore");
  }
  if (options.check_completeness) {
    for (NodeId u = 0; u < n; ++u) {
      if (!tree.is_terminal(u) || computed[u]) continue;
      std::string vs;
      for (const auto& v : tree.node(u).terminals) vs += (vs.empty() ? "" : ", ") + v;
      flag(seq.ops.size(), Constraint::completeness,
           "terminal node " + std::to_string(u) + " never computed (versions: " + vs + ")");
    }
  }
  return out;
}

Seconds evaluate_cost(const ExecTree& tree, const ReplaySequence& seq) {
  auto violations = validate_sequence(tree, 0, seq, {.check_budget = false,
                                                     .check_completeness = false});
  if (!violations.empty()) throw InvalidSequence(std::move(violations));
  Seconds total = 0;
  for (const auto& op : seq.ops) {
    if (op.kind == OpKind::compute) total += tree.node(op.node).delta;
  }
  return total;
}

Seconds naive_cost(const ExecTree& tree) {
  Seconds total = 0;
  for (const auto& v : tree.versions()) {
    auto t = tree.terminal_of(v);
    for (NodeId u = *t; u != kNoNode; u = tree.parent(u)) total += tree.node(u).delta;
  }
  return total;
}

ExecutionLog simulate(const ExecTree& tree, Bytes budget, const ReplaySequence& seq) {
  auto violations = validate_sequence(tree, budget, seq, {.check_budget = true,
                                                          .check_completeness = false});
  if (!violations.empty()) throw InvalidSequence(std::move(violations));

  ExecutionLog log;
  std::vector<char> cached(tree.size(), 0);
  std::vector<char> computed(tree.size(), 0);
  Bytes bytes = 0;
  Seconds cost = 0;
  NodeId working = tree.root();
  log.steps.reserve(seq.ops.size());
  std::vector<NodeId> cache_list;

  for (std::size_t i = 0; i < seq.ops.size(); ++i) {
    const auto& op = seq.ops[i];
    LogStep step;
    step.step = i;
    step.op = op;
    switch (op.kind) {
      case OpKind::compute:
        cost += tree.node(op.node).delta;
        working = op.node;
        ++log.counts.ct;
        if (!computed[op.node]) {
          computed[op.node] = 1;
          step.completed_versions = tree.node(op.node).terminals;
        }
        break;
      case OpKind::checkpoint:
        cached[op.node] = 1;
        bytes += tree.node(op.node).size;
        cache_list.insert(std::lower_bound(cache_list.begin(), cache_list.end(), op.node),
                          op.node);
        ++log.counts.cp;
        break;
      case OpKind::restore:
        working = op.node;
        ++log.counts.rs;
        break;
      case OpKind::evict:
        cached[op.node] = 0;
        bytes -= tree.node(op.node).size;
        cache_list.erase(std::lower_bound(cache_list.begin(), cache_list.end(), op.node));
        ++log.counts.ev;
        break;
    }
    log.peak_cache = std::max(log.peak_cache, bytes);
    step.cost_cum = cost;
    step.cache_bytes = bytes;
    step.cache = cache_list;
    step.working = working;
    log.steps.push_back(std::move(step));
  }
  log.total_cost = cost;
  return log;
}

PlanReport make_report(const ExecTree& tree, std::string algorithm, Bytes budget,
                       ReplaySequence seq, std::optional<Seconds> predicted) {
  ExecutionLog log = simulate(tree, budget, seq);
  PlanReport r;
  r.algorithm = std::move(algorithm);
  r.budget = budget;
  r.sequence = std::move(seq);
  r.total_cost = log.total_cost;
  r.peak_cache = log.peak_cache;
  r.counts = log.counts;
  r.predicted_cost = predicted;
  return r;
}

std::size_t versions_completed(const ExecutionLog& log, Seconds tau) {
  std::size_t done = 0;
  for (const auto& s : log.steps) {
    if (!cost_leq(s.cost_cum, tau)) break;
    done += s.completed_versions.size();
  }
  return done;
}

}  // namespace mvr
