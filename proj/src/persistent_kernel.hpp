#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mvr/exectree.hpp"

namespace mvr::detail {

// dfs_cost over a precomputed membership mask; `extra` (when not kNoNode) is
// treated as an additional member, so candidate scans never copy the mask.
std::optional<Seconds> dfs_cost_masked(const ExecTree& tree, const TreeFacts& facts,
                                       const std::vector<char>& in_set, NodeId extra,
                                       Bytes budget);

std::vector<char> membership(const ExecTree& tree, std::span<const NodeId> nodes);

}  // namespace mvr::detail
