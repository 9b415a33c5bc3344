#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace mvr {

using NodeId = std::size_t;
using Bytes = std::uint64_t;
using Seconds = double;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kRootId = 0;

// All cost comparisons use this absolute slack; gadget costs are fractional.
inline constexpr double kCostEpsilon = 1e-9;

inline bool cost_equal(Seconds a, Seconds b) {
  return std::fabs(a - b) <= kCostEpsilon;
}
inline bool cost_less(Seconds a, Seconds b) { return a < b - kCostEpsilon; }
inline bool cost_leq(Seconds a, Seconds b) { return a <= b + kCostEpsilon; }

// Malformed traces, trees, plans or instances supplied by the caller.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mvr
