#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvr/types.hpp"

namespace mvr {

enum class EventKind { fork, exec, open, read, write, close, mem, interrupt, other };

std::string_view to_string(EventKind kind);
// Throws InputError on names outside the closed set.
EventKind parse_event_kind(std::string_view name);

struct EventRecord {
  std::int64_t pid = 0;
  EventKind kind = EventKind::other;
  // File path, or the child pid (decimal) for fork events.
  std::optional<std::string> target;
  std::optional<std::string> content_hash;
};

// Lineage of the program state after one cell. Digests are lowercase hex
// SHA-256.
struct NormalizedLineage {
  std::string digest;
  bool interrupted = false;
  std::uint64_t mem_count = 0;

  // The lineage g_0 of the initial environment state.
  static NormalizedLineage empty();
};

inline constexpr std::string_view kDigestAlgorithm = "sha256";

// Interrupted lineages are unequal to everything, including themselves.
bool lineage_equal(const NormalizedLineage& a, const NormalizedLineage& b);

// Order- and pid-insensitive canonical text for one cell's events. Processes
// are grouped per pid, forked children are nested at their fork event, and
// unrelated top-level processes are sorted by their canonical text. mem
// events are dropped; `mem_count` receives their number when non-null.
std::string canonical_events(std::span<const EventRecord> events,
                             std::uint64_t* mem_count = nullptr);

NormalizedLineage normalize_events(std::span<const EventRecord> events,
                                   const NormalizedLineage& prev,
                                   std::string_view code_hash);

struct VersionTrace;

// Folds normalize_events over the cells of one version, starting at g_0.
std::vector<NormalizedLineage> lineage_chain(const VersionTrace& trace);

std::string sha256_hex(std::string_view data);

}  // namespace mvr
