#include <doctest.h>

#include <map>
#include <queue>
#include <set>

#include "fixture.hpp"
#include "mvr/planners.hpp"

using namespace mvr;

namespace {

std::vector<NodeId> random_subset(std::mt19937_64& rng, const ExecTree& t) {
  std::vector<NodeId> s;
  for (NodeId u = 1; u < t.size(); ++u) {
    if (rng() % 3 == 0) s.push_back(u);
  }
  return s;
}

// Dijkstra over single operations with no pruning at all: state is
// (working node, cache set, computed terminals, CP allowed). Only for tiny
// trees.
Seconds brute_force_optimum(const ExecTree& t, Bytes budget) {
  struct S {
    NodeId working;
    std::uint32_t cache;
    std::uint32_t done;
    NodeId cp_ok;  // node a CP may follow, or kNoNode
    auto operator<=>(const S&) const = default;
  };
  std::uint32_t all = 0;
  for (NodeId u = 1; u < t.size(); ++u) {
    if (t.is_terminal(u)) all |= 1u << u;
  }
  auto bytes = [&](std::uint32_t c) {
    Bytes b = 0;
    for (NodeId u = 1; u < t.size(); ++u) {
      if (c >> u & 1) b += t.node(u).size;
    }
    return b;
  };
  std::map<S, Seconds> dist;
  using Item = std::pair<Seconds, S>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  auto relax = [&](const S& s, Seconds d) {
    auto it = dist.find(s);
    if (it != dist.end() && it->second <= d) return;
    dist[s] = d;
    pq.push({d, s});
  };
  relax({t.root(), 0, 0, kNoNode}, 0);
  while (!pq.empty()) {
    auto [d, s] = pq.top();
    pq.pop();
    if (dist[s] < d) continue;
    if ((s.done & all) == all) return d;
    auto compute = [&](NodeId x, NodeId from) {
      if (s.cache >> x & 1) return;
      relax({x, s.cache, s.done | (t.is_terminal(x) ? 1u << x : 0u), x}, d + t.node(x).delta);
      (void)from;
    };
    for (NodeId x = 1; x < t.size(); ++x) {
      if (t.parent(x) == t.root() || t.parent(x) == s.working) compute(x, s.working);
      // RS(parent, x) then CT x
      if (s.cache >> t.parent(x) & 1) compute(x, t.parent(x));
    }
    if (s.cp_ok != kNoNode && !(s.cache >> s.cp_ok & 1) &&
        bytes(s.cache | 1u << s.cp_ok) <= budget) {
      relax({s.working, s.cache | 1u << s.cp_ok, s.done, kNoNode}, d);
    }
    for (NodeId x = 1; x < t.size(); ++x) {
      if (s.cache >> x & 1) relax({s.working, s.cache & ~(1u << x), s.done, s.cp_ok}, d);
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("planners: dfs_cost on the fixture") {
  const auto f = test::fixture();
  CHECK(*dfs_cost(f.tree, {}, 0) == 26);
  CHECK(*dfs_cost(f.tree, {}, 1000) == 26);
  std::vector<NodeId> a{f.a};
  CHECK(*dfs_cost(f.tree, a, 5) == 25);
  std::vector<NodeId> ab{f.a, f.b};
  CHECK_FALSE(dfs_cost(f.tree, ab, 5).has_value());
  CHECK(*dfs_cost(f.tree, ab, 10) == 25);
  std::vector<NodeId> b{f.b};
  CHECK(*dfs_cost(f.tree, b, 5) == 26);
  std::vector<NodeId> root{f.tree.root()};
  CHECK(*dfs_cost(f.tree, root, 0) == 26);
}

TEST_CASE("planners: materialize_persistent on the fixture") {
  const auto f = test::fixture();
  std::vector<NodeId> a{f.a};
  auto seq = materialize_persistent(f.tree, a, 5);
  auto log = simulate(f.tree, 5, seq);
  CHECK(log.counts.ct == 5);
  CHECK(log.counts.cp == 1);
  CHECK(log.counts.rs == 1);
  CHECK(log.total_cost == 25);
  auto plain = materialize_persistent(f.tree, {}, 0);
  CHECK(plain.ops.size() == 6);
  CHECK(evaluate_cost(f.tree, plain) == 26);
  std::vector<NodeId> ab{f.a, f.b};
  CHECK_THROWS_AS(materialize_persistent(f.tree, ab, 5), InputError);
}

TEST_CASE("planners property: dfs_cost equals the cost of the materialized sequence") {
  std::mt19937_64 rng(31);
  int feasible = 0;
  for (int c = 0; c < 1500; ++c) {
    const auto t = test::random_tree(rng, 1 + rng() % 14);
    const Bytes budget = rng() % 16;
    const auto s = random_subset(rng, t);
    const auto cost = dfs_cost(t, s, budget);
    if (!cost) continue;
    ++feasible;
    const auto seq = materialize_persistent(t, s, budget);
    REQUIRE(validate_sequence(t, budget, seq).empty());
    REQUIRE(cost_equal(evaluate_cost(t, seq), *cost));
  }
  CHECK(feasible >= 1000);
}

TEST_CASE("planners: chain trees cost the delta sum") {
  ExecTree chain;
  NodeId u = chain.root();
  for (int i = 1; i <= 5; ++i) u = chain.add_node(u, i, 3, "c" + std::to_string(i), NormalizedLineage::empty());
  chain.mark_terminal(u, "v");
  chain.mark_terminal(2, "w");
  for (Bytes b : {0, 3, 100}) {
    for (auto algo : {Algorithm::prp1, Algorithm::prp2, Algorithm::pc, Algorithm::exact}) {
      CHECK(run_planner(chain, algo, b).total_cost == 15);
    }
    std::vector<NodeId> all{1, 2, 3};
    if (auto c = dfs_cost(chain, all, b)) {
      CHECK(*c == 15);
      CHECK(simulate(chain, b, materialize_persistent(chain, all, b)).counts.rs == 0);
    }
  }
  auto d = pc_decision(chain, 100, 2, std::vector<NodeId>{1});
  CHECK_FALSE(d.cache_node);
}

TEST_CASE("planners: PRP on the fixture") {
  const auto f = test::fixture();
  auto sel = prp_select(f.tree, 5, PrpVariant::v1);
  CHECK(sel.cached == std::vector<NodeId>{f.a});
  CHECK(sel.cost_trace == std::vector<Seconds>{26, 25});
  CHECK(prp_plan(f.tree, 5, PrpVariant::v1).total_cost == 25);
  CHECK(prp_plan(f.tree, 5, PrpVariant::v2).total_cost == 25);
  CHECK(prp_plan(f.tree, 0, PrpVariant::v1).total_cost == 26);
  CHECK(prp_select(f.tree, 0, PrpVariant::v2).cached.empty());
  CHECK(prp_plan(f.tree, 25, PrpVariant::v1).total_cost == 25);
}

TEST_CASE("planners property: PRP serial and parallel scans agree, greedy progresses") {
  std::mt19937_64 rng(32);
  for (int c = 0; c < 300; ++c) {
    const auto t = test::random_tree(rng, 1 + rng() % 30);
    const Bytes budget = rng() % 20;
    for (auto v : {PrpVariant::v1, PrpVariant::v2}) {
      const auto s = prp_select(t, budget, v, Execution::serial);
      const auto p = prp_select(t, budget, v, Execution::parallel);
      REQUIRE(s.cached == p.cached);
      REQUIRE(s.cost_trace == p.cost_trace);
      for (std::size_t i = 1; i < s.cost_trace.size(); ++i) {
        REQUIRE(cost_less(s.cost_trace[i], s.cost_trace[i - 1]));
      }
      const auto r = prp_plan(t, budget, v, Execution::serial);
      REQUIRE(cost_equal(r.total_cost, s.cost_trace.back()));
    }
  }
}

TEST_CASE("planners: PC on the fixture") {
  const auto f = test::fixture();
  auto r = pc_plan(f.tree, 5);
  CHECK(r.total_cost == 25);
  CHECK(*r.predicted_cost == 25);
  auto d = pc_decision(f.tree, 5, f.a, {});
  CHECK(d.cache_node);
  CHECK(d.with_parent == std::vector<NodeId>{f.b, f.d});
  CHECK(d.without_parent.empty());
  CHECK(pc_plan(f.tree, 0).total_cost == 26);
  CHECK_FALSE(pc_decision(f.tree, 0, f.a, {}).cache_node);
  CHECK_THROWS_AS(pc_decision(f.tree, 5, f.a, std::vector<NodeId>{f.b}), InputError);
}

TEST_CASE("planners property: PC prediction, PRP dominance and budget monotonicity") {
  std::mt19937_64 rng(33);
  for (int c = 0; c < 400; ++c) {
    const auto t = test::random_tree(rng, 1 + rng() % 25);
    Seconds prev = std::numeric_limits<Seconds>::infinity();
    for (Bytes b = 0; b <= 20; b += 1 + rng() % 4) {
      const auto r = pc_plan(t, b);
      REQUIRE(validate_sequence(t, b, r.sequence).empty());
      REQUIRE(cost_equal(*r.predicted_cost, r.total_cost));
      REQUIRE(cost_leq(r.total_cost, prev));
      prev = r.total_cost;
      // The persistent policy is one of PC's choices.
      REQUIRE(cost_leq(r.total_cost, prp_plan(t, b, PrpVariant::v1).total_cost));
      REQUIRE(cost_leq(r.total_cost, prp_plan(t, b, PrpVariant::v2).total_cost));
    }
    const TreeFacts facts(t);
    REQUIRE(cost_equal(pc_plan(t, facts.max_path_size).total_cost, facts.total_delta));
    REQUIRE(cost_equal(prp_plan(t, facts.total_size, PrpVariant::v1).total_cost, facts.total_delta));
    REQUIRE(cost_equal(pc_plan(t, 0).total_cost, *dfs_cost(t, {}, 0)));
  }
}

TEST_CASE("planners: LFU on the fixture") {
  const auto f = test::fixture();
  CHECK(lfu_plan(f.tree, 5).total_cost == 35);
  CHECK(lfu_plan(f.tree, 0).total_cost == 37);
  CHECK(lfu_plan(f.tree, 25).total_cost == 25);
  auto r = lfu_plan(f.tree, 5);
  CHECK(r.counts.cp == 1);
  CHECK(validate_sequence(f.tree, 5, r.sequence).empty());
}

TEST_CASE("planners property: LFU plans are valid and bounded by naive cost") {
  std::mt19937_64 rng(34);
  for (int c = 0; c < 300; ++c) {
    const auto t = test::random_tree(rng, 1 + rng() % 25);
    const Bytes b = rng() % 20;
    const auto r = lfu_plan(t, b);
    REQUIRE(validate_sequence(t, b, r.sequence).empty());
    REQUIRE(cost_leq(r.total_cost, naive_cost(t)));
    REQUIRE(cost_equal(lfu_plan(t, 0).total_cost, naive_cost(t)));
  }
}

TEST_CASE("planners: exact search on the fixture and limits") {
  const auto f = test::fixture();
  CHECK(exact_plan(f.tree, 5).plan->total_cost == 25);
  CHECK(exact_plan(f.tree, 0).plan->total_cost == 26);
  ExactLimits tiny;
  tiny.max_nodes = 3;
  auto out = exact_plan(f.tree, 5, tiny);
  CHECK_FALSE(out.available());
  CHECK(out.unavailable_reason.find("oracle unavailable") == 0);
  CHECK_THROWS_AS(run_planner(f.tree, Algorithm::exact, 5, tiny), OracleUnavailable);
  ExactLimits few;
  few.max_expansions = 2;
  CHECK_FALSE(exact_plan(f.tree, 5, few).available());
  ExactLimits states;
  states.max_states = 3;
  const auto capped = exact_plan(f.tree, 5, states);
  CHECK_FALSE(capped.available());
  CHECK(capped.unavailable_reason.find("generated states") != std::string::npos);
}

TEST_CASE("planners property: exact search matches an unpruned search and dominates") {
  std::mt19937_64 rng(35);
  for (int c = 0; c < 300; ++c) {
    const auto t = test::random_tree(rng, 1 + rng() % 6);
    const Bytes b = rng() % 12;
    const auto ex = exact_plan(t, b);
    REQUIRE(ex.available());
    REQUIRE(validate_sequence(t, b, ex.plan->sequence).empty());
    REQUIRE(cost_equal(ex.plan->total_cost, brute_force_optimum(t, b)));
  }
  for (int c = 0; c < 200; ++c) {
    const auto t = test::random_tree(rng, 1 + rng() % 10, 4);
    const Bytes b = rng() % 16;
    const auto ex = exact_plan(t, b);
    REQUIRE(ex.available());
    ExactLimits ucs;
    ucs.lower_bound = false;
    REQUIRE(cost_equal(exact_plan(t, b, ucs).plan->total_cost, ex.plan->total_cost));
    REQUIRE(cost_leq(TreeFacts(t).total_delta, ex.plan->total_cost));
    for (auto algo : {Algorithm::prp1, Algorithm::prp2, Algorithm::pc, Algorithm::lfu}) {
      REQUIRE(cost_leq(ex.plan->total_cost, run_planner(t, algo, b).total_cost));
    }
  }
}

TEST_CASE("planners: algorithm names") {
  CHECK(parse_algorithm("prp2") == Algorithm::prp2);
  CHECK(algorithm_name(Algorithm::lfu) == "lfu");
  CHECK_THROWS_AS(parse_algorithm("lru"), InputError);
}
