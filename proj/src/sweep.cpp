#include "mvr/sweep.hpp"

#include <chrono>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>

#include "mvr/io.hpp"

namespace mvr {

Bytes parse_budget(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double mult = 1;
  auto ends_with = [&](std::string_view suf) {
    if (s.size() < suf.size()) return false;
    for (std::size_t i = 0; i < suf.size(); ++i) {
      char c = s[s.size() - suf.size() + i];
      if (std::toupper(static_cast<unsigned char>(c)) != suf[i]) return false;
    }
    return true;
  };
  if (ends_with("KB")) { mult = 1e3; s.remove_suffix(2); }
  else if (ends_with("MB")) { mult = 1e6; s.remove_suffix(2); }
  else if (ends_with("GB")) { mult = 1e9; s.remove_suffix(2); }
  else if (ends_with("B")) { s.remove_suffix(1); }
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !(value >= 0)) {
    throw InputError("invalid budget '" + std::string(text) + "'");
  }
  return static_cast<Bytes>(std::llround(value * mult));
}

std::vector<Bytes> budget_grid(Bytes max, std::size_t points) {
  if (points < 2) return {max};
  std::vector<Bytes> out;
  for (std::size_t i = 0; i < points; ++i) {
    out.push_back(static_cast<Bytes>(static_cast<long double>(max) * i / (points - 1)));
  }
  return out;
}

SweepResult run_sweep(const ExecTree& tree, const SweepSpec& spec, Execution exec) {
  if (spec.algorithms.empty() || spec.budgets.empty()) {
    throw InputError("sweep needs at least one algorithm and one budget");
  }
  const std::size_t nb = spec.budgets.size();
  const std::size_t points = spec.algorithms.size() * nb;
  const std::size_t nt = spec.taus.size();
  SweepResult result;
  result.rows.resize(points);
  result.tau_rows.resize(points * nt);
  std::vector<std::exception_ptr> errors(points);

  auto run_point = [&](std::size_t i) {
    try {
      const Algorithm algo = spec.algorithms[i / nb];
      const Bytes budget = spec.budgets[i % nb];
      const auto start = std::chrono::steady_clock::now();
      // Points already run concurrently; planners stay serial inside.
      PlanReport r = run_planner(tree, algo, budget, spec.limits,
                                 exec == Execution::parallel ? Execution::serial : exec);
      const auto stop = std::chrono::steady_clock::now();
      result.rows[i] = SweepRow{algo, budget, r.total_cost, r.peak_cache, r.counts.cp,
                                r.counts.rs,
                                std::chrono::duration<double, std::milli>(stop - start).count()};
      if (nt > 0) {
        const ExecutionLog log = simulate(tree, budget, r.sequence);
        for (std::size_t k = 0; k < nt; ++k) {
          result.tau_rows[i * nt + k] =
              TauRow{algo, budget, spec.taus[k], versions_completed(log, spec.taus[k])};
        }
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (exec == Execution::parallel) {
    const auto count = static_cast<std::ptrdiff_t>(points);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) run_point(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < points; ++i) run_point(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return result;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool include_timing) {
  os << "algorithm,budget_bytes,total_cost_s,peak_cache_bytes,cp_count,rs_count,plan_wall_ms\n";
  for (const auto& r : rows) {
    os << algorithm_name(r.algorithm) << ',' << r.budget << ',' << io::format_seconds(r.total_cost)
       << ',' << r.peak_cache << ',' << r.cp_count << ',' << r.rs_count << ','
       << (include_timing ? io::format_seconds(r.plan_wall_ms) : std::string("0.000")) << '\n';
  }
}

void write_tau_csv(std::ostream& os, const std::vector<TauRow>& rows) {
  os << "algorithm,budget_bytes,tau_s,versions_completed\n";
  for (const auto& r : rows) {
    os << algorithm_name(r.algorithm) << ',' << r.budget << ',' << io::format_seconds(r.tau)
       << ',' << r.versions_completed << '\n';
  }
}

}  // namespace mvr
