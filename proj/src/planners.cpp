#include "mvr/planners.hpp"

namespace mvr {

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::prp1: return "prp1";
    case Algorithm::prp2: return "prp2";
    case Algorithm::pc: return "pc";
    case Algorithm::lfu: return "lfu";
    case Algorithm::exact: return "exact";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::prp1, Algorithm::prp2, Algorithm::pc, Algorithm::lfu,
                 Algorithm::exact}) {
    if (algorithm_name(a) == name) return a;
  }
  throw InputError("unknown algorithm '" + std::string(name) +
                   "' (expected prp1, prp2, pc, lfu or exact)");
}

PlanReport run_planner(const ExecTree& tree, Algorithm algorithm, Bytes budget,
                       const ExactLimits& limits, Execution exec) {
  switch (algorithm) {
    case Algorithm::prp1: return prp_plan(tree, budget, PrpVariant::v1, exec);
    case Algorithm::prp2: return prp_plan(tree, budget, PrpVariant::v2, exec);
    case Algorithm::pc: return pc_plan(tree, budget);
    case Algorithm::lfu: return lfu_plan(tree, budget);
    case Algorithm::exact: {
      ExactOutcome out = exact_plan(tree, budget, limits);
      if (!out.available()) throw OracleUnavailable(out.unavailable_reason);
      return std::move(*out.plan);
    }
  }
  throw InputError("unknown algorithm");
}

}  // namespace mvr
