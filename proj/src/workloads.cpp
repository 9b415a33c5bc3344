#include "mvr/workloads.hpp"

#include <cmath>
#include <random>
#include <string>

namespace mvr {

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::ci: return "ci";
    case SynthKind::di: return "di";
    case SynthKind::an: return "an";
  }
  return "?";
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "ci" || name == "CI") return SynthKind::ci;
  if (name == "di" || name == "DI") return SynthKind::di;
  if (name == "an" || name == "AN") return SynthKind::an;
  throw InputError("unknown workload kind '" + std::string(name) + "' (ci, di or an)");
}

namespace {

// std distributions are implementation-defined; these mappings keep generated
// trees identical across standard libraries.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}
  bool coin() { return (rng_() >> 63) != 0; }
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  Seconds seconds(Seconds lo, Seconds hi) {
    return std::round((lo + unit() * (hi - lo)) * 1000.0) / 1000.0;
  }
  Bytes bytes(Bytes lo, Bytes hi) {
    const double span = static_cast<double>(hi - lo) + 1.0;
    return std::min(hi, lo + static_cast<Bytes>(unit() * span));
  }

 private:
  std::mt19937_64 rng_;
};

class Generator {
 public:
  explicit Generator(const SynthSpec& spec) : spec_(spec), draws_(spec.seed) {
    delta_ = spec.delta_range.value_or(spec.kind == SynthKind::di
                                           ? std::pair<Seconds, Seconds>{100, 100}
                                           : std::pair<Seconds, Seconds>{100, 600});
    size_ = spec.size_range.value_or(
        spec.kind == SynthKind::ci ? std::pair<Bytes, Bytes>{kGigabyte / 2, kGigabyte / 2}
                                   : std::pair<Bytes, Bytes>{kGigabyte / 10,
                                                             6 * kGigabyte / 10});
  }

  ExecTree run() {
    grow(tree_.root(), 0, true);
    std::size_t v = 0;
    std::vector<NodeId> stack{tree_.root()};
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      if (u != tree_.root() && tree_.is_leaf(u)) tree_.mark_terminal(u, "v" + std::to_string(v++));
      const auto& ch = tree_.children(u);
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return std::move(tree_);
  }

 private:
  void grow(NodeId u, int depth, bool on_spine) {
    if (depth >= spec_.max_depth) {
      if (on_spine) spine_done_ = true;
      return;
    }
    std::vector<NodeId> created;
    for (int b = 0; b < spec_.max_branch; ++b) {
      if (!draws_.coin()) continue;
      if (!created.empty() && leaves_ >= static_cast<std::size_t>(spec_.max_versions)) continue;
      if (!created.empty()) ++leaves_;
      created.push_back(make_child(u, depth + 1));
    }
    if (created.empty() && on_spine && !spine_done_) created.push_back(make_child(u, depth + 1));
    for (std::size_t i = 0; i < created.size(); ++i) {
      grow(created[i], depth + 1, on_spine && i == 0 && !spine_done_);
    }
  }

  NodeId make_child(NodeId parent, int depth) {
    Seconds delta = 0;
    Bytes size = 0;
    switch (spec_.kind) {
      case SynthKind::ci:
        delta = draws_.seconds(delta_.first, delta_.second);
        size = size_.first;
        break;
      case SynthKind::di:
        delta = delta_.first;
        size = draws_.bytes(size_.first, size_.second);
        break;
      case SynthKind::an: {
        const double t =
            spec_.max_depth > 1 ? static_cast<double>(depth - 1) / (spec_.max_depth - 1) : 0.0;
        delta = std::round((delta_.first + t * (delta_.second - delta_.first)) * 1000.0) / 1000.0;
        size = size_.first + static_cast<Bytes>(
                                 std::llround(t * static_cast<double>(size_.second - size_.first)));
        break;
      }
    }
    const NodeId id = tree_.size();
    return tree_.add_node(parent, delta, size, "synth-" + std::to_string(id),
                          NormalizedLineage::empty());
  }

  SynthSpec spec_;
  Draws draws_;
  std::pair<Seconds, Seconds> delta_;
  std::pair<Bytes, Bytes> size_;
  ExecTree tree_;
  std::size_t leaves_ = 1;
  bool spine_done_ = false;
};

}  // namespace

ExecTree generate(const SynthSpec& spec) {
  if (spec.max_branch < 1 || spec.max_depth < 1 || spec.max_versions < 1) {
    throw InputError("max_branch, max_depth and max_versions must be >= 1");
  }
  if (spec.delta_range && !(0 <= spec.delta_range->first &&
                            spec.delta_range->first <= spec.delta_range->second)) {
    throw InputError("delta range must satisfy 0 <= lo <= hi");
  }
  if (spec.size_range && spec.size_range->first > spec.size_range->second) {
    throw InputError("size range must satisfy lo <= hi");
  }
  return Generator(spec).run();
}

void check_instance(const BinPackingInstance& inst) {
  if (inst.sizes.empty()) throw InputError("bin packing instance has no items");
  if (inst.bin == 0) throw InputError("bin size must be positive");
  if (inst.bins == 0) throw InputError("bin count must be positive");
  for (Bytes s : inst.sizes) {
    if (s == 0 || s > inst.bin) throw InputError("item sizes must lie in [1, bin]");
  }
  if (inst.sizes.size() > 1 && inst.bins >= inst.sizes.size()) {
    throw InputError("bin count must be smaller than the item count");
  }
}

GadgetOutput gadget_from_binpacking(const BinPackingInstance& inst) {
  check_instance(inst);
  const Bytes b = inst.bin;
  const std::size_t n = inst.sizes.size();
  const std::size_t k = inst.bins;
  GadgetOutput out;
  ExecTree& t = out.tree;
  auto add = [&](NodeId parent, Seconds delta, Bytes size, const std::string& name) {
    return t.add_node(parent, delta, size, "gadget:" + name, NormalizedLineage::empty());
  };
  auto leaf = [&](NodeId parent, const std::string& name) {
    NodeId id = add(parent, 0, 4 * b, name);
    t.mark_terminal(id, name);
  };

  const NodeId a = add(t.root(), 1.0 / (2.0 * static_cast<double>(k)), 2 * b, "a");
  for (std::size_t i = 1; i <= n; ++i) {
    const std::string bi = "b" + std::to_string(i);
    const NodeId bn = add(a, 1, inst.sizes[i - 1], bi);
    for (int j = 1; j <= 2; ++j) {
      const std::string cij = "c" + std::to_string(i) + std::to_string(j);
      const NodeId cn = add(bn, 1, 2 * b, cij);
      for (int l = 1; l <= 2; ++l) leaf(cn, "d" + std::to_string(i) + std::to_string(j) + std::to_string(l));
    }
  }
  for (std::size_t j = 1; j <= k; ++j) {
    const std::string ej = "e" + std::to_string(j);
    const NodeId en = add(a, 1, 2 * b, ej);
    for (int l = 1; l <= 2; ++l) leaf(en, "f" + std::to_string(j) + std::to_string(l));
  }
  out.budget = 3 * b;
  out.threshold = 3.0 * static_cast<double>(n) + static_cast<double>(k) + 0.5;
  return out;
}

}  // namespace mvr
