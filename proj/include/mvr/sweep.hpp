#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "mvr/planners.hpp"

namespace mvr {

// "500", "500B", "1.5KB", "0.5GB": decimal units (powers of 1000).
Bytes parse_budget(std::string_view text);

// `points` evenly spaced budgets from 0 to `max`, both ends included.
std::vector<Bytes> budget_grid(Bytes max, std::size_t points);

struct SweepSpec {
  std::vector<Algorithm> algorithms;
  std::vector<Bytes> budgets;
  std::vector<Seconds> taus;  // optional versions-in-time grid
  ExactLimits limits;
};

struct SweepRow {
  Algorithm algorithm = Algorithm::pc;
  Bytes budget = 0;
  Seconds total_cost = 0;
  Bytes peak_cache = 0;
  std::size_t cp_count = 0;
  std::size_t rs_count = 0;
  double plan_wall_ms = 0;
};

struct TauRow {
  Algorithm algorithm = Algorithm::pc;
  Bytes budget = 0;
  Seconds tau = 0;
  std::size_t versions_completed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;      // (algorithm, budget) order
  std::vector<TauRow> tau_rows;    // (algorithm, budget, tau) order
};

// Points are independent and run concurrently under Execution::parallel;
// output order never depends on completion order. Throws InputError on empty
// grids and OracleUnavailable when exact declines a point.
SweepResult run_sweep(const ExecTree& tree, const SweepSpec& spec,
                      Execution exec = Execution::parallel);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     bool include_timing = true);
void write_tau_csv(std::ostream& os, const std::vector<TauRow>& rows);

}  // namespace mvr
