#include "mvr/lineage.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <set>
#include <string>

#include "mvr/trace.hpp"

namespace mvr {

namespace {

constexpr std::array<std::string_view, 9> kKindNames = {
    "fork", "exec", "open", "read", "write", "close", "mem", "interrupt", "other"};

void append_field(std::string& out, std::string_view value) {
  out += std::to_string(value.size());
  out += ':';
  out += value;
}

std::int64_t parse_child_pid(const EventRecord& ev, std::size_t index) {
  if (!ev.target || ev.target->empty()) {
    throw InputError("event " + std::to_string(index) +
                     ": fork event without child pid target");
  }
  std::int64_t child = 0;
  const auto& t = *ev.target;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), child);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw InputError("event " + std::to_string(index) +
                     ": fork target '" + t + "' is not a pid");
  }
  return child;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(std::span<const EventRecord> events) : events_(events) {
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto& ev = events[i];
      per_pid_[ev.pid].push_back(i);
      if (ev.kind == EventKind::mem) ++mem_count_;
      if (ev.kind != EventKind::fork) continue;
      std::int64_t child = parse_child_pid(ev, i);
      if (child == ev.pid) {
        throw InputError("event " + std::to_string(i) + ": process forks itself");
      }
      if (!forked_.insert(child).second) {
        throw InputError("event " + std::to_string(i) + ": pid " +
                         std::to_string(child) + " forked twice");
      }
      fork_child_[i] = child;
    }
  }

  std::string run() {
    std::vector<std::string> top;
    for (const auto& [pid, idx] : per_pid_) {
      if (!forked_.contains(pid)) top.push_back(process_text(pid));
    }
    // Every process reachable from a top-level one has been emitted; anything
    // left over sits on a fork cycle.
    if (visited_.size() != all_pids()) {
      throw InputError("fork edges form a cycle");
    }
    std::sort(top.begin(), top.end());
    std::string out;
    for (const auto& t : top) {
      out += 'P';
      out += t;
    }
    return out;
  }

  std::uint64_t mem_count() const { return mem_count_; }

 private:
  std::size_t all_pids() const {
    std::set<std::int64_t> pids(forked_.begin(), forked_.end());
    for (const auto& [pid, idx] : per_pid_) pids.insert(pid);
    return pids.size();
  }

  std::string process_text(std::int64_t pid) {
    if (!visited_.insert(pid).second) {
      throw InputError("fork edges form a cycle at pid " + std::to_string(pid));
    }
    std::string out = "[";
    auto it = per_pid_.find(pid);
    if (it != per_pid_.end()) {
      for (std::size_t i : it->second) {
        const auto& ev = events_[i];
        if (ev.kind == EventKind::mem) continue;
        out += to_string(ev.kind);
        if (ev.kind == EventKind::fork) {
          out += '{';
          out += process_text(fork_child_.at(i));
          out += '}';
        } else {
          out += ev.target ? 'T' : '-';
          if (ev.target) append_field(out, *ev.target);
          out += ev.content_hash ? 'H' : '-';
          if (ev.content_hash) append_field(out, *ev.content_hash);
        }
        out += ';';
      }
    }
    out += ']';
    return out;
  }

  std::span<const EventRecord> events_;
  std::map<std::int64_t, std::vector<std::size_t>> per_pid_;
  std::map<std::size_t, std::int64_t> fork_child_;
  std::set<std::int64_t> forked_;
  std::set<std::int64_t> visited_;
  std::uint64_t mem_count_ = 0;
};

}  // namespace

std::string_view to_string(EventKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

EventKind parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  throw InputError("unknown event kind '" + std::string(name) + "'");
}

NormalizedLineage NormalizedLineage::empty() {
  return NormalizedLineage{std::string(64, '0'), false, 0};
}

bool lineage_equal(const NormalizedLineage& a, const NormalizedLineage& b) {
  if (a.interrupted || b.interrupted) return false;
  return a.digest == b.digest;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string canonical_events(std::span<const EventRecord> events,
                             std::uint64_t* mem_count) {
  Canonicalizer c(events);
  std::string text = c.run();
  if (mem_count) *mem_count = c.mem_count();
  return text;
}

NormalizedLineage normalize_events(std::span<const EventRecord> events,
                                   const NormalizedLineage& prev,
                                   std::string_view code_hash) {
  NormalizedLineage out;
  std::string canon = canonical_events(events, &out.mem_count);
  out.interrupted = std::any_of(events.begin(), events.end(), [](const auto& e) {
    return e.kind == EventKind::interrupt;
  });

  std::string buf = "mvr-lineage-v1\n";
  append_field(buf, prev.digest);
  append_field(buf, code_hash);
  append_field(buf, canon);
  append_field(buf, std::to_string(out.mem_count));
  out.digest = sha256_hex(buf);
  return out;
}

std::vector<NormalizedLineage> lineage_chain(const VersionTrace& trace) {
  std::vector<NormalizedLineage> chain;
  chain.reserve(trace.cells.size());
  NormalizedLineage prev = NormalizedLineage::empty();
  for (std::size_t i = 0; i < trace.cells.size(); ++i) {
    const auto& cell = trace.cells[i];
    try {
      prev = normalize_events(cell.events, prev, cell.code_hash);
    } catch (const InputError& e) {
      throw InputError("version '" + trace.version_id + "' cell " +
                       std::to_string(i) + ": " + e.what());
    }
    chain.push_back(prev);
  }
  return chain;
}

}  // namespace mvr
