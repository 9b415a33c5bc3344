#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvr/exectree.hpp"
#include "mvr/types.hpp"

namespace mvr {

enum class OpKind { compute, checkpoint, restore, evict };

std::string_view op_code(OpKind kind);  // "CT", "CP", "RS", "EV"
OpKind parse_op_code(std::string_view code);

struct ReplayOp {
  OpKind kind = OpKind::compute;
  NodeId node = 0;
  // Only meaningful for restore: the tree child switched to after loading
  // `node` from the cache.
  NodeId child = kNoNode;

  static ReplayOp ct(NodeId u) { return {OpKind::compute, u, kNoNode}; }
  static ReplayOp cp(NodeId u) { return {OpKind::checkpoint, u, kNoNode}; }
  static ReplayOp rs(NodeId u, NodeId k) { return {OpKind::restore, u, k}; }
  static ReplayOp ev(NodeId u) { return {OpKind::evict, u, kNoNode}; }

  friend bool operator==(const ReplayOp&, const ReplayOp&) = default;
};

std::string to_string(const ReplayOp& op);

struct ReplaySequence {
  std::vector<ReplayOp> ops;
  friend bool operator==(const ReplaySequence&, const ReplaySequence&) = default;
};

// Which operation rule a violation breaks.
enum class Constraint {
  checkpoint = 1,    // CP only right after CT of the same node (EVs between)
  restore = 2,       // RS from cache, switching to a tree child computed next
  evict = 3,         // EV only of cached nodes
  compute = 4,       // CT continues from the parent in working memory
  budget = 5,        // cached bytes never exceed the budget
  completeness = 6,  // every terminal node is computed
  minimality = 7,    // no CT of a cached node, no CP of a cached node
  reference = 8,     // op names a node or child that does not exist
};

struct Violation {
  std::size_t step = 0;  // index into ops; ops.size() for end-of-sequence checks
  Constraint constraint = Constraint::reference;
  std::string message;
};

std::string to_string(const Violation& v);

struct ValidateOptions {
  bool check_budget = true;
  bool check_completeness = true;
};

// Working memory holds one state. It starts at the environment (root), which
// is always reconstructible, so a child of the root may be computed at any
// step. CT(u) sets working memory to u; RS(u, k) loads u and must be followed
// by CT(k); CP and EV leave working memory unchanged.
std::vector<Violation> validate_sequence(const ExecTree& tree, Bytes budget,
                                         const ReplaySequence& seq,
                                         const ValidateOptions& options = {});

class InvalidSequence : public std::runtime_error {
 public:
  explicit InvalidSequence(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Sum of delta over CT ops. The sequence must satisfy the operation rules
// (budget and completeness are not part of the cost); throws InvalidSequence
// otherwise.
Seconds evaluate_cost(const ExecTree& tree, const ReplaySequence& seq);

// Every version replayed from scratch with no sharing at all.
Seconds naive_cost(const ExecTree& tree);

struct OpCounts {
  std::size_t ct = 0;
  std::size_t cp = 0;
  std::size_t rs = 0;
  std::size_t ev = 0;
};

struct LogStep {
  std::size_t step = 0;
  ReplayOp op;
  Seconds cost_cum = 0;
  Bytes cache_bytes = 0;
  std::vector<NodeId> cache;  // sorted
  NodeId working = kRootId;
  // Versions whose terminal is computed for the first time at this step.
  std::vector<std::string> completed_versions;
};

struct ExecutionLog {
  std::vector<LogStep> steps;
  Seconds total_cost = 0;
  Bytes peak_cache = 0;
  OpCounts counts;
};

// Step-by-step replay against the simulated cache. Throws InvalidSequence on
// any violation other than incompleteness.
ExecutionLog simulate(const ExecTree& tree, Bytes budget, const ReplaySequence& seq);

struct PlanReport {
  std::string algorithm;
  Bytes budget = 0;
  ReplaySequence sequence;
  Seconds total_cost = 0;
  Bytes peak_cache = 0;
  OpCounts counts;
  std::optional<Seconds> predicted_cost;
};

// Fills the cost, peak and counters of a report by simulating `seq`.
PlanReport make_report(const ExecTree& tree, std::string algorithm, Bytes budget,
                       ReplaySequence seq,
                       std::optional<Seconds> predicted = std::nullopt);

// Number of versions whose terminal has been computed within the longest plan
// prefix with cumulative cost <= tau.
std::size_t versions_completed(const ExecutionLog& log, Seconds tau);

}  // namespace mvr
