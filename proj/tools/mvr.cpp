// mvr: merge versioned execution traces into an execution tree and plan
// cache-constrained replays of it.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mvr/exectree.hpp"
#include "mvr/io.hpp"
#include "mvr/planners.hpp"
#include "mvr/replay.hpp"
#include "mvr/sweep.hpp"
#include "mvr/workloads.hpp"

namespace {

bool g_verbose = false;

void note(const std::string& msg) {
  if (g_verbose) std::cerr << "mvr: " << msg << '\n';
}

void emit_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    mvr::io::write_json(path, j);
  }
}

struct MergeArgs {
  std::vector<std::string> traces;
  std::string output = "-";
  double cost_ratio = 2.0;
  double size_ratio = 2.0;
  bool mean = false;
};

int cmd_merge(const MergeArgs& a) {
  std::vector<mvr::VersionTrace> traces;
  for (const auto& f : a.traces) {
    auto part = mvr::io::read_traces(f);
    traces.insert(traces.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  mvr::MergeOptions opts;
  opts.tolerances = {a.cost_ratio, a.size_ratio};
  opts.mean_aggregation = a.mean;
  auto result = mvr::merge_versions(traces, opts);
  for (const auto& w : result.warnings) std::cerr << "mvr: warning: " << w << '\n';
  note("merged " + std::to_string(traces.size()) + " versions into " +
       std::to_string(result.tree.size()) + " nodes");
  emit_json(a.output, mvr::io::tree_to_json(result.tree));
  return 0;
}

struct GenArgs {
  std::string kind = "ci";
  std::uint64_t seed = 0;
  int max_branch = 4;
  int max_depth = 6;
  int max_versions = 20;
  std::string output = "-";
};

int cmd_gen(const GenArgs& a) {
  mvr::SynthSpec spec;
  spec.kind = mvr::parse_synth_kind(a.kind);
  spec.seed = a.seed;
  spec.max_branch = a.max_branch;
  spec.max_depth = a.max_depth;
  spec.max_versions = a.max_versions;
  emit_json(a.output, mvr::io::tree_to_json(mvr::generate(spec)));
  return 0;
}

struct GadgetArgs {
  std::vector<std::uint64_t> items;
  std::uint64_t bin = 0;
  std::size_t bins = 0;
  std::string output;
};

int cmd_gadget(const GadgetArgs& a) {
  mvr::BinPackingInstance inst{a.items, a.bin, a.bins};
  auto g = mvr::gadget_from_binpacking(inst);
  if (!a.output.empty()) mvr::io::write_tree(a.output, g.tree);
  std::cout << "nodes " << g.tree.size() - 1 << "\n"
            << "budget " << g.budget << "\n"
            << "threshold " << g.threshold << "\n";
  return 0;
}

struct PlanArgs {
  std::string tree;
  std::string algo = "pc";
  std::string budget = "0";
  std::string output;
  std::size_t max_nodes = mvr::ExactLimits{}.max_nodes;
  std::size_t max_expansions = mvr::ExactLimits{}.max_expansions;
  std::size_t max_states = mvr::ExactLimits{}.max_states;
};

int cmd_plan(const PlanArgs& a) {
  const auto tree = mvr::io::read_tree(a.tree);
  const auto budget = mvr::parse_budget(a.budget);
  const auto algo = mvr::parse_algorithm(a.algo);
  mvr::ExactLimits limits;
  limits.max_nodes = a.max_nodes;
  limits.max_expansions = a.max_expansions;
  limits.max_states = a.max_states;
  mvr::PlanReport r;
  try {
    r = mvr::run_planner(tree, algo, budget, limits);
  } catch (const mvr::OracleUnavailable& e) {
    std::cerr << "mvr: " << e.what() << '\n';
    return 3;
  }
  if (!a.output.empty()) {
    mvr::io::write_json(a.output, mvr::io::plan_to_json(r.algorithm, r.budget, r.sequence));
  }
  auto j = mvr::io::report_to_json(r);
  std::cout << j.dump(2) << '\n';
  std::cout << "total_cost " << mvr::io::format_seconds(r.total_cost) << '\n';
  return 0;
}

struct EvalArgs {
  std::string tree;
  std::string plan;
  std::string budget;
  std::string log;
};

int cmd_eval(const EvalArgs& a) {
  const auto tree = mvr::io::read_tree(a.tree);
  const auto plan = mvr::io::read_plan(a.plan);
  const mvr::Bytes budget = a.budget.empty() ? plan.budget : mvr::parse_budget(a.budget);
  const auto violations = mvr::validate_sequence(tree, budget, plan.sequence);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cout << "violation " << mvr::to_string(v) << '\n';
    std::cout << "valid false\n";
    return 2;
  }
  const auto log = mvr::simulate(tree, budget, plan.sequence);
  if (!a.log.empty()) {
    std::ofstream out(a.log);
    if (a.log.ends_with(".csv")) {
      mvr::io::write_log_csv(out, log);
    } else {
      mvr::io::write_log_jsonl(out, log);
    }
  }
  std::cout << "valid true\n"
            << "total_cost " << mvr::io::format_seconds(log.total_cost) << '\n'
            << "peak_cache " << log.peak_cache << '\n'
            << "counts ct=" << log.counts.ct << " cp=" << log.counts.cp
            << " rs=" << log.counts.rs << " ev=" << log.counts.ev << '\n';
  return 0;
}

struct SweepArgs {
  std::string tree;
  std::vector<std::string> algos{"prp1", "prp2", "pc", "lfu"};
  std::vector<std::string> budgets;
  std::size_t budget_steps = 0;
  std::vector<double> taus;
  std::string output = "-";
  std::string tau_output;
  bool no_timing = false;
  bool serial = false;
  std::size_t max_nodes = mvr::ExactLimits{}.max_nodes;
  std::size_t max_expansions = mvr::ExactLimits{}.max_expansions;
  std::size_t max_states = mvr::ExactLimits{}.max_states;
};

int cmd_sweep(const SweepArgs& a) {
  const auto tree = mvr::io::read_tree(a.tree);
  mvr::SweepSpec spec;
  for (const auto& s : a.algos) spec.algorithms.push_back(mvr::parse_algorithm(s));
  for (const auto& b : a.budgets) spec.budgets.push_back(mvr::parse_budget(b));
  if (a.budget_steps > 0) {
    for (auto b : mvr::budget_grid(mvr::TreeFacts(tree).total_size, a.budget_steps)) {
      spec.budgets.push_back(b);
    }
  }
  spec.taus = a.taus;
  spec.limits.max_nodes = a.max_nodes;
  spec.limits.max_expansions = a.max_expansions;
  spec.limits.max_states = a.max_states;
  mvr::SweepResult res;
  try {
    res = mvr::run_sweep(tree, spec,
                         a.serial ? mvr::Execution::serial : mvr::Execution::parallel);
  } catch (const mvr::OracleUnavailable& e) {
    std::cerr << "mvr: " << e.what() << '\n';
    return 3;
  }
  std::ostringstream csv;
  mvr::write_sweep_csv(csv, res.rows, !a.no_timing);
  if (a.output == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream(a.output) << csv.str();
  }
  if (!spec.taus.empty()) {
    std::string tau_path = a.tau_output;
    if (tau_path.empty()) tau_path = a.output == "-" ? "-" : a.output + ".tau.csv";
    std::ostringstream tcsv;
    mvr::write_tau_csv(tcsv, res.tau_rows);
    if (tau_path == "-") {
      std::cout << tcsv.str();
    } else {
      std::ofstream(tau_path) << tcsv.str();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiversion replay planner: execution-tree merge and cache-constrained replay plans"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", g_verbose, "Log progress to stderr");

  MergeArgs merge;
  auto* m = app.add_subcommand("merge", "Merge version trace files into an execution tree");
  m->add_option("traces", merge.traces, "Trace JSON files")->required()->check(CLI::ExistingFile);
  m->add_option("-o,--output", merge.output, "Tree file (default stdout)");
  m->add_option("--cost-ratio", merge.cost_ratio, "Max delta ratio for equal states")->check(CLI::Range(1.0, 1e300));
  m->add_option("--size-ratio", merge.size_ratio, "Max size ratio for equal states")->check(CLI::Range(1.0, 1e300));
  m->add_flag("--mean", merge.mean, "Average delta/size of merged states instead of first-wins");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic execution tree");
  g->add_option("--kind", gen.kind, "ci, di or an");
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--max-branch", gen.max_branch, "Max children per node");
  g->add_option("--max-depth", gen.max_depth, "Max version length");
  g->add_option("--max-versions", gen.max_versions, "Max number of versions");
  g->add_option("-o,--output", gen.output, "Tree file (default stdout)");

  GadgetArgs gad;
  auto* gd = app.add_subcommand("gadget", "Build the bin-packing reduction tree");
  gd->add_option("--items", gad.items, "Item sizes")->required()->delimiter(',');
  gd->add_option("--bin", gad.bin, "Bin size")->required();
  gd->add_option("--bins", gad.bins, "Number of bins")->required();
  gd->add_option("-o,--output", gad.output, "Tree file");

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Compute a replay plan");
  p->add_option("tree", plan.tree, "Tree file")->required()->check(CLI::ExistingFile);
  p->add_option("--algo", plan.algo, "prp1, prp2, pc, lfu or exact");
  p->add_option("--budget", plan.budget, "Cache budget, e.g. 500MB");
  p->add_option("-o,--output", plan.output, "Plan file");
  p->add_option("--max-nodes", plan.max_nodes, "Exact search node limit");
  p->add_option("--max-expansions", plan.max_expansions, "Exact search expansion limit");
  p->add_option("--max-states", plan.max_states, "Exact search generated-state limit");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Validate and evaluate a plan");
  e->add_option("tree", ev.tree, "Tree file")->required()->check(CLI::ExistingFile);
  e->add_option("plan", ev.plan, "Plan file")->required()->check(CLI::ExistingFile);
  e->add_option("--budget", ev.budget, "Override the plan's budget");
  e->add_option("--log", ev.log, "Write the execution log (.csv or JSON lines)");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Run planners over a budget grid");
  s->add_option("tree", sw.tree, "Tree file")->required()->check(CLI::ExistingFile);
  s->add_option("--algos", sw.algos, "Algorithms")->delimiter(',');
  s->add_option("--budgets", sw.budgets, "Budgets")->delimiter(',');
  s->add_option("--budget-steps", sw.budget_steps,
                "Add this many evenly spaced budgets from 0 to the total checkpoint size");
  s->add_option("--taus", sw.taus, "Time budgets (s) for versions-in-time rows")->delimiter(',');
  s->add_option("-o,--output", sw.output, "CSV file (default stdout)");
  s->add_option("--tau-output", sw.tau_output, "CSV for versions-in-time rows");
  s->add_flag("--no-timing", sw.no_timing, "Write 0 in plan_wall_ms");
  s->add_flag("--serial", sw.serial, "Run sweep points one at a time");
  s->add_option("--max-nodes", sw.max_nodes, "Exact search node limit");
  s->add_option("--max-expansions", sw.max_expansions, "Exact search expansion limit");
  s->add_option("--max-states", sw.max_states, "Exact search generated-state limit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*m) return cmd_merge(merge);
    if (*g) return cmd_gen(gen);
    if (*gd) return cmd_gadget(gad);
    if (*p) return cmd_plan(plan);
    if (*e) return cmd_eval(ev);
    if (*s) {
      if (sw.budgets.empty() && sw.budget_steps == 0) {
        std::cerr << "mvr: sweep needs --budgets or --budget-steps\n";
        return 1;
      }
      return cmd_sweep(sw);
    }
  } catch (const mvr::InputError& ex) {
    std::cerr << "mvr: error: " << ex.what() << '\n';
    return 1;
  } catch (const mvr::InvalidSequence& ex) {
    std::cerr << "mvr: error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
