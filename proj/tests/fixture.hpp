#pragma once

#include <random>

#include "mvr/exectree.hpp"

namespace mvr::test {

// root -> a(1) -> { b(10) -> c(1), d(11) -> e(2) }, every size 5.
// Versions: v1 ends at b, v2 at c, v3 at e.
struct Fixture {
  ExecTree tree;
  NodeId a, b, c, d, e;
};

inline Fixture fixture() {
  Fixture f;
  auto add = [&](NodeId p, Seconds delta, const char* code) {
    return f.tree.add_node(p, delta, 5, code, NormalizedLineage::empty());
  };
  f.a = add(f.tree.root(), 1, "a");
  f.b = add(f.a, 10, "b");
  f.c = add(f.b, 1, "c");
  f.d = add(f.a, 11, "d");
  f.e = add(f.d, 2, "e");
  f.tree.mark_terminal(f.b, "v1");
  f.tree.mark_terminal(f.c, "v2");
  f.tree.mark_terminal(f.e, "v3");
  return f;
}

// Random tree with `nodes` non-root nodes; every leaf is terminal and each
// internal node is terminal with probability 1/4. Integer deltas keep cost
// comparisons exact.
inline ExecTree random_tree(std::mt19937_64& rng, std::size_t nodes, std::size_t max_terminals = 64,
                            Bytes max_size = 5) {
  for (;;) {
    ExecTree t;
    for (std::size_t i = 0; i < nodes; ++i) {
      const NodeId parent = static_cast<NodeId>(rng() % t.size());
      t.add_node(parent, static_cast<Seconds>(1 + rng() % 10), 1 + rng() % max_size,
                 "n" + std::to_string(i + 1), NormalizedLineage::empty());
    }
    std::size_t v = 0;
    for (NodeId u = 1; u < t.size(); ++u) {
      if (t.is_leaf(u) || rng() % 4 == 0) t.mark_terminal(u, "v" + std::to_string(v++));
    }
    if (v <= max_terminals) return t;
  }
}

}  // namespace mvr::test
