#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvr/exectree.hpp"
#include "mvr/replay.hpp"
#include "mvr/trace.hpp"

namespace mvr::io {

using nlohmann::json;

// Trace ingest: {version_id, environment_hash, cells: [{code_hash,
// delta_seconds, size_bytes, events: [{pid, kind, target?, content_hash?}]}]}.
// A file may hold one such object or an array of them.
VersionTrace trace_from_json(const json& j);
json trace_to_json(const VersionTrace& trace);
std::vector<VersionTrace> read_traces(const std::filesystem::path& path);

// Tree file: {meta: {digest_algo, tolerances, versions}, nodes: [{id, parent,
// delta, size, code_hash, lineage, terminals}]}. Ids are 0..n-1 with the root
// at 0; children order is node order.
json tree_to_json(const ExecTree& tree);
ExecTree tree_from_json(const json& j);
ExecTree read_tree(const std::filesystem::path& path);
void write_tree(const std::filesystem::path& path, const ExecTree& tree);

// Plan file: {algorithm, budget_bytes, ops: [{op, node, child?}]}.
struct PlanFile {
  std::string algorithm;
  Bytes budget = 0;
  ReplaySequence sequence;
};

json plan_to_json(const std::string& algorithm, Bytes budget, const ReplaySequence& seq);
PlanFile plan_from_json(const json& j);
PlanFile read_plan(const std::filesystem::path& path);

json report_to_json(const PlanReport& report);

// step, op, node, cost_cum, cache_bytes
void write_log_csv(std::ostream& os, const ExecutionLog& log);
void write_log_jsonl(std::ostream& os, const ExecutionLog& log);

// Seconds with three decimals.
std::string format_seconds(Seconds s);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace mvr::io
