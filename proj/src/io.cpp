#include "mvr/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace mvr::io {

namespace {

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + ": field '" + key + "': " + e.what());
  }
}

std::optional<std::string> optional_text(const json& ev, const char* key,
                                         const std::string& where) {
  if (!ev.contains(key) || ev.at(key).is_null()) return std::nullopt;
  const auto& v = ev.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw InputError(where + ": field '" + key + "' must be a string");
}

}  // namespace

VersionTrace trace_from_json(const json& j) {
  VersionTrace t;
  t.version_id = required<std::string>(j, "version_id", "trace");
  const std::string where = "version '" + t.version_id + "'";
  t.environment_hash = required<std::string>(j, "environment_hash", where);
  const auto cells = required<json>(j, "cells", where);
  if (!cells.is_array()) throw InputError(where + ": cells must be an array");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string cw = where + " cell " + std::to_string(i);
    const auto& c = cells[i];
    CellRecord cell;
    cell.code_hash = required<std::string>(c, "code_hash", cw);
    cell.delta = required<double>(c, "delta_seconds", cw);
    if (!(cell.delta >= 0)) throw InputError(cw + ": delta_seconds must be >= 0");
    const auto size = required<json>(c, "size_bytes", cw);
    if (!size.is_number_unsigned() && !(size.is_number_integer() && size.get<std::int64_t>() >= 0)) {
      throw InputError(cw + ": size_bytes must be a non-negative integer");
    }
    cell.size = size.get<Bytes>();
    const auto events = c.contains("events") ? c.at("events") : json::array();
    if (!events.is_array()) throw InputError(cw + ": events must be an array");
    for (std::size_t k = 0; k < events.size(); ++k) {
      const std::string ew = cw + " event " + std::to_string(k);
      const auto& e = events[k];
      EventRecord ev;
      ev.pid = required<std::int64_t>(e, "pid", ew);
      try {
        ev.kind = parse_event_kind(required<std::string>(e, "kind", ew));
      } catch (const InputError& err) {
        throw InputError(ew + ": " + err.what());
      }
      ev.target = optional_text(e, "target", ew);
      ev.content_hash = optional_text(e, "content_hash", ew);
      if (ev.kind == EventKind::fork && !ev.target) {
        throw InputError(ew + ": fork event without child pid target");
      }
      cell.events.push_back(std::move(ev));
    }
    t.cells.push_back(std::move(cell));
  }
  return t;
}

json trace_to_json(const VersionTrace& trace) {
  json cells = json::array();
  for (const auto& c : trace.cells) {
    json events = json::array();
    for (const auto& e : c.events) {
      json ev = {{"pid", e.pid}, {"kind", std::string(to_string(e.kind))}};
      if (e.target) ev["target"] = *e.target;
      if (e.content_hash) ev["content_hash"] = *e.content_hash;
      events.push_back(std::move(ev));
    }
    cells.push_back({{"code_hash", c.code_hash},
                     {"delta_seconds", c.delta},
                     {"size_bytes", c.size},
                     {"events", std::move(events)}});
  }
  return {{"version_id", trace.version_id},
          {"environment_hash", trace.environment_hash},
          {"cells", std::move(cells)}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<VersionTrace> read_traces(const std::filesystem::path& path) {
  const json j = read_json(path);
  std::vector<VersionTrace> out;
  try {
    if (j.is_array()) {
      for (const auto& t : j) out.push_back(trace_from_json(t));
    } else {
      out.push_back(trace_from_json(j));
    }
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return out;
}

json tree_to_json(const ExecTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"parent", n.parent == kNoNode ? json(nullptr) : json(n.parent)},
                     {"delta", n.delta},
                     {"size", n.size},
                     {"code_hash", n.code_hash},
                     {"lineage",
                      {{"digest", n.lineage.digest},
                       {"interrupted", n.lineage.interrupted},
                       {"mem_count", n.lineage.mem_count}}},
                     {"terminals", n.terminals}});
  }
  json meta = {{"digest_algo", std::string(kDigestAlgorithm)},
               {"tolerances",
                {{"cost_ratio", tree.tolerances.cost_ratio},
                 {"size_ratio", tree.tolerances.size_ratio}}},
               {"versions", tree.versions()}};
  return {{"meta", std::move(meta)}, {"nodes", std::move(nodes)}};
}

ExecTree tree_from_json(const json& j) {
  const auto nodes = required<json>(j, "nodes", "tree");
  if (!nodes.is_array() || nodes.empty()) throw InputError("tree: nodes must be a non-empty array");
  std::vector<ExecNode> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "tree node " + std::to_string(i);
    const auto& n = nodes[i];
    ExecNode node;
    node.id = required<NodeId>(n, "id", where);
    if (node.id != i) throw InputError(where + ": ids must be 0..n-1 in order");
    if (!n.contains("parent") || n.at("parent").is_null()) {
      if (i != 0) throw InputError(where + ": only node 0 may lack a parent");
    } else {
      node.parent = required<NodeId>(n, "parent", where);
      if (node.parent >= i) throw InputError(where + ": parent must precede the node");
    }
    node.delta = required<double>(n, "delta", where);
    node.size = required<Bytes>(n, "size", where);
    node.code_hash = n.value("code_hash", std::string());
    if (n.contains("lineage") && n.at("lineage").is_object()) {
      const auto& l = n.at("lineage");
      node.lineage.digest = l.value("digest", std::string());
      node.lineage.interrupted = l.value("interrupted", false);
      node.lineage.mem_count = l.value("mem_count", std::uint64_t{0});
    } else if (n.contains("lineage") && n.at("lineage").is_string()) {
      node.lineage.digest = n.at("lineage").get<std::string>();
    }
    if (n.contains("terminals")) node.terminals = n.at("terminals").get<std::vector<std::string>>();
    out.push_back(std::move(node));
  }
  std::vector<std::string> order;
  Tolerances tol;
  if (j.contains("meta")) {
    const auto& m = j.at("meta");
    if (m.contains("versions")) order = m.at("versions").get<std::vector<std::string>>();
    if (m.contains("tolerances")) {
      tol.cost_ratio = m.at("tolerances").value("cost_ratio", tol.cost_ratio);
      tol.size_ratio = m.at("tolerances").value("size_ratio", tol.size_ratio);
    }
  }
  ExecTree tree = ExecTree::from_nodes(std::move(out), std::move(order));
  tree.tolerances = tol;
  return tree;
}

ExecTree read_tree(const std::filesystem::path& path) {
  try {
    return tree_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_tree(const std::filesystem::path& path, const ExecTree& tree) {
  write_json(path, tree_to_json(tree));
}

json plan_to_json(const std::string& algorithm, Bytes budget, const ReplaySequence& seq) {
  json ops = json::array();
  for (const auto& op : seq.ops) {
    json o = {{"op", std::string(op_code(op.kind))}, {"node", op.node}};
    if (op.kind == OpKind::restore) o["child"] = op.child;
    ops.push_back(std::move(o));
  }
  return {{"algorithm", algorithm}, {"budget_bytes", budget}, {"ops", std::move(ops)}};
}

PlanFile plan_from_json(const json& j) {
  PlanFile p;
  p.algorithm = j.value("algorithm", std::string());
  p.budget = required<Bytes>(j, "budget_bytes", "plan");
  const auto ops = required<json>(j, "ops", "plan");
  if (!ops.is_array()) throw InputError("plan: ops must be an array");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string where = "plan op " + std::to_string(i);
    ReplayOp op;
    try {
      op.kind = parse_op_code(required<std::string>(ops[i], "op", where));
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    op.node = required<NodeId>(ops[i], "node", where);
    if (op.kind == OpKind::restore) op.child = required<NodeId>(ops[i], "child", where);
    p.sequence.ops.push_back(op);
  }
  return p;
}

PlanFile read_plan(const std::filesystem::path& path) {
  try {
    return plan_from_json(read_json(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

json report_to_json(const PlanReport& r) {
  json j = {{"algorithm", r.algorithm},
            {"budget_bytes", r.budget},
            {"total_cost", r.total_cost},
            {"peak_cache", r.peak_cache},
            {"counts", {{"ct", r.counts.ct}, {"cp", r.counts.cp}, {"rs", r.counts.rs}, {"ev", r.counts.ev}}},
            {"ops", r.sequence.ops.size()}};
  j["predicted_cost"] = r.predicted_cost ? json(*r.predicted_cost) : json(nullptr);
  return j;
}

std::string format_seconds(Seconds s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

void write_log_csv(std::ostream& os, const ExecutionLog& log) {
  os << "step,op,node,cost_cum,cache_bytes\n";
  for (const auto& s : log.steps) {
    os << s.step << ',' << op_code(s.op.kind) << ',' << s.op.node << ','
       << format_seconds(s.cost_cum) << ',' << s.cache_bytes << '\n';
  }
}

void write_log_jsonl(std::ostream& os, const ExecutionLog& log) {
  for (const auto& s : log.steps) {
    json j = {{"step", s.step},
              {"op", std::string(op_code(s.op.kind))},
              {"node", s.op.node},
              {"cost_cum", s.cost_cum},
              {"cache_bytes", s.cache_bytes},
              {"cache", s.cache},
              {"working", s.working}};
    if (s.op.kind == OpKind::restore) j["child"] = s.op.child;
    if (!s.completed_versions.empty()) j["completed_versions"] = s.completed_versions;
    os << j.dump() << '\n';
  }
}

}  // namespace mvr::io
