#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mvr/exectree.hpp"
#include "mvr/types.hpp"

namespace mvr {

enum class SynthKind {
  ci,  // compute intensive: delta uniform in range, constant size
  di,  // data intensive: constant delta, size uniform in range
  an,  // analytical: delta and size grow linearly with depth
};

std::string_view to_string(SynthKind kind);
SynthKind parse_synth_kind(std::string_view name);

inline constexpr Bytes kGigabyte = 1'000'000'000;

struct SynthSpec {
  SynthKind kind = SynthKind::ci;
  int max_branch = 4;
  int max_depth = 6;
  int max_versions = 20;
  std::uint64_t seed = 0;
  // Unset ranges take the per-kind defaults: delta 100-600 s (DI: 100 s),
  // size 0.1-0.6 GB (CI: 0.5 GB).
  std::optional<std::pair<Seconds, Seconds>> delta_range;
  std::optional<std::pair<Bytes, Bytes>> size_range;
};

// Seeded and deterministic. Each node above max_depth draws up to max_branch
// children with probability 1/2 each; the first-child spine from the root is
// forced to reach max_depth, and extra branches stop once max_versions leaves
// exist. Every leaf is the terminal of one version.
ExecTree generate(const SynthSpec& spec);

struct BinPackingInstance {
  std::vector<Bytes> sizes;
  Bytes bin = 0;
  std::size_t bins = 0;
};

// Throws InputError unless sizes are positive and <= bin, bins >= 1 and
// bins < item count (single-item instances excepted).
void check_instance(const BinPackingInstance& inst);

struct GadgetOutput {
  ExecTree tree;
  Bytes budget = 0;       // 3 * bin
  Seconds threshold = 0;  // 3n + K + 1/2
};

// Replay tree whose optimal cost is at most the threshold exactly when the
// items fit into the given number of bins. The gadget root hangs below the
// environment node, so the tree has 2 + 7n + 3K nodes in total.
GadgetOutput gadget_from_binpacking(const BinPackingInstance& inst);

}  // namespace mvr
