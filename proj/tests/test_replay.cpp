#include <doctest.h>

#include <set>

#include "fixture.hpp"
#include "mvr/planners.hpp"
#include "mvr/replay.hpp"

using namespace mvr;

namespace {

using Op = ReplayOp;

bool has_constraint(const std::vector<Violation>& vs, Constraint c) {
  for (const auto& v : vs) {
    if (v.constraint == c) return true;
  }
  return false;
}

// Independent checker for the operation rules, budget and completeness with
// single-slot working memory.
bool reference_valid(const ExecTree& t, Bytes budget, const ReplaySequence& seq) {
  NodeId working = t.root();
  std::set<NodeId> cache;
  std::set<NodeId> computed;
  Bytes used = 0;
  NodeId last_ct = kNoNode;  // CT eligible for a CP (only EVs since)
  for (std::size_t i = 0; i < seq.ops.size(); ++i) {
    const auto& op = seq.ops[i];
    if (op.node >= t.size() || op.node == t.root()) return false;
    switch (op.kind) {
      case OpKind::compute:
        if (cache.count(op.node)) return false;
        if (t.parent(op.node) != t.root() && working != t.parent(op.node)) return false;
        working = op.node;
        computed.insert(op.node);
        last_ct = op.node;
        break;
      case OpKind::checkpoint:
        if (last_ct != op.node || cache.count(op.node)) return false;
        cache.insert(op.node);
        used += t.node(op.node).size;
        if (used > budget) return false;
        last_ct = kNoNode;
        break;
      case OpKind::restore: {
        if (!cache.count(op.node)) return false;
        if (op.child >= t.size() || t.parent(op.child) != op.node) return false;
        if (i + 1 >= seq.ops.size() || !(seq.ops[i + 1] == Op::ct(op.child))) return false;
        working = op.node;
        last_ct = kNoNode;
        break;
      }
      case OpKind::evict:
        if (!cache.erase(op.node)) return false;
        used -= t.node(op.node).size;
        break;
    }
  }
  for (NodeId u = 0; u < t.size(); ++u) {
    if (t.is_terminal(u) && !computed.count(u)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("replay: costs on the fixture") {
  const auto f = test::fixture();
  CHECK(naive_cost(f.tree) == 37);
  CHECK(evaluate_cost(f.tree, {{Op::ct(f.a), Op::ct(f.b)}}) == 11);
  ReplaySequence s{{Op::ct(f.a), Op::cp(f.a), Op::rs(f.a, f.d), Op::ct(f.d), Op::ct(f.e)}};
  CHECK(evaluate_cost(f.tree, s) == 14);
  CHECK(evaluate_cost(ExecTree(), {}) == 0);
  CHECK(validate_sequence(ExecTree(), 0, {}).empty());
  ExecTree chain;
  NodeId u = chain.root();
  for (int i = 1; i <= 4; ++i) u = chain.add_node(u, i, 1, "c" + std::to_string(i), NormalizedLineage::empty());
  chain.mark_terminal(u, "only");
  CHECK(naive_cost(chain) == 10);
}

TEST_CASE("replay: validator examples") {
  const auto f = test::fixture();
  SUBCASE("materialized S={a} is valid") {
    std::vector<NodeId> s{f.a};
    auto seq = materialize_persistent(f.tree, s, 5);
    CHECK(validate_sequence(f.tree, 5, seq).empty());
    CHECK(reference_valid(f.tree, 5, seq));
  }
  SUBCASE("restore of a never-checkpointed node") {
    ReplaySequence seq{{Op::ct(f.a), Op::ct(f.b), Op::rs(f.b, f.c), Op::ct(f.c)}};
    auto vs = validate_sequence(f.tree, 5, seq);
    CHECK(has_constraint(vs, Constraint::restore));
    CHECK_THROWS_AS(evaluate_cost(f.tree, seq), InvalidSequence);
  }
  SUBCASE("missing version v3") {
    ReplaySequence seq{{Op::ct(f.a), Op::ct(f.b), Op::ct(f.c)}};
    auto vs = validate_sequence(f.tree, 5, seq);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].constraint == Constraint::completeness);
    CHECK(vs[0].message.find("v3") != std::string::npos);
    CHECK(evaluate_cost(f.tree, seq) == 12);
  }
  SUBCASE("budget") {
    ReplaySequence seq{{Op::ct(f.a), Op::cp(f.a), Op::ct(f.b), Op::cp(f.b), Op::ct(f.c),
                        Op::rs(f.a, f.d), Op::ct(f.d), Op::ct(f.e)}};
    CHECK(has_constraint(validate_sequence(f.tree, 5, seq), Constraint::budget));
    CHECK(validate_sequence(f.tree, 10, seq).empty());
  }
  SUBCASE("minimality") {
    ReplaySequence seq{{Op::ct(f.a), Op::cp(f.a), Op::ct(f.a)}};
    CHECK(has_constraint(validate_sequence(f.tree, 5, seq), Constraint::minimality));
    ReplaySequence twice{{Op::ct(f.a), Op::cp(f.a), Op::cp(f.a)}};
    CHECK_FALSE(validate_sequence(f.tree, 10, twice).empty());
  }
  SUBCASE("compute needs the parent in working memory") {
    ReplaySequence seq{{Op::ct(f.a), Op::ct(f.b), Op::ct(f.d)}};
    CHECK(has_constraint(validate_sequence(f.tree, 5, seq), Constraint::compute));
  }
  SUBCASE("checkpoint only of the working node") {
    ReplaySequence seq{{Op::ct(f.a), Op::ct(f.b), Op::cp(f.a)}};
    CHECK(has_constraint(validate_sequence(f.tree, 5, seq), Constraint::checkpoint));
  }
  SUBCASE("evict of an uncached node") {
    ReplaySequence seq{{Op::ct(f.a), Op::ev(f.a)}};
    CHECK(has_constraint(validate_sequence(f.tree, 5, seq), Constraint::evict));
  }
  SUBCASE("restore must be followed by its child") {
    ReplaySequence seq{{Op::ct(f.a), Op::cp(f.a), Op::rs(f.a, f.d), Op::ev(f.a), Op::ct(f.d)}};
    CHECK(has_constraint(validate_sequence(f.tree, 5, seq), Constraint::restore));
  }
}

TEST_CASE("replay: validator agrees with the reference checker on random sequences") {
  std::mt19937_64 rng(21);
  int valid = 0;
  for (int c = 0; c < 20000; ++c) {
    const auto t = test::random_tree(rng, 1 + rng() % 6);
    const Bytes budget = rng() % 12;
    ReplaySequence seq;
    const std::size_t len = rng() % 10;
    NodeId working = t.root();
    for (std::size_t i = 0; i < len; ++i) {
      const NodeId u = 1 + rng() % (t.size() - 1);
      // Bias towards plausible moves so valid sequences show up.
      switch (rng() % 5) {
        case 0:
        case 1: {
          const auto& ch = t.children(working);
          const NodeId x = ch.empty() || rng() % 4 == 0 ? u : ch[rng() % ch.size()];
          seq.ops.push_back(Op::ct(x));
          working = x;
          break;
        }
        case 2: seq.ops.push_back(Op::cp(rng() % 3 ? working : u)); break;
        case 3: {
          const auto& ch = t.children(u);
          const NodeId k = ch.empty() ? u : ch[rng() % ch.size()];
          seq.ops.push_back(Op::rs(u, k));
          if (rng() % 4) {
            seq.ops.push_back(Op::ct(k));
            working = k;
          }
          break;
        }
        default: seq.ops.push_back(Op::ev(u)); break;
      }
    }
    const bool ref = reference_valid(t, budget, seq);
    valid += ref;
    REQUIRE(validate_sequence(t, budget, seq).empty() == ref);
  }
  CHECK(valid > 100);
}

TEST_CASE("replay: simulate traces the fixture PRP plan") {
  const auto f = test::fixture();
  auto r = prp_plan(f.tree, 5, PrpVariant::v1);
  auto log = simulate(f.tree, 5, r.sequence);
  CHECK(log.peak_cache == 5);
  CHECK(log.counts.cp == 1);
  CHECK(log.counts.rs == 1);
  CHECK(log.total_cost == evaluate_cost(f.tree, r.sequence));
  CHECK(log.steps.back().cost_cum == log.total_cost);
  Seconds ct_sum = 0;
  for (const auto& s : log.steps) {
    if (s.op.kind == OpKind::compute) ct_sum += f.tree.node(s.op.node).delta;
  }
  CHECK(ct_sum == log.total_cost);

  auto zero = prp_plan(f.tree, 0, PrpVariant::v1);
  auto zlog = simulate(f.tree, 0, zero.sequence);
  CHECK(zlog.counts.cp + zlog.counts.rs + zlog.counts.ev == 0);
}

TEST_CASE("replay: versions completed within a time budget") {
  const auto f = test::fixture();
  auto r = pc_plan(f.tree, 5);
  auto log = simulate(f.tree, 5, r.sequence);
  CHECK(versions_completed(log, 10.9) == 0);
  CHECK(versions_completed(log, 11) == 1);
  CHECK(versions_completed(log, 12) == 2);
  CHECK(versions_completed(log, 24.9) == 2);
  CHECK(versions_completed(log, 25) == 3);
}

TEST_CASE("replay: op codes") {
  CHECK(op_code(OpKind::restore) == "RS");
  CHECK(parse_op_code("EV") == OpKind::evict);
  CHECK_THROWS_AS(parse_op_code("XX"), InputError);
}
