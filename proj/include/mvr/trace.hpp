#pragma once

#include <string>
#include <vector>

#include "mvr/lineage.hpp"
#include "mvr/types.hpp"

namespace mvr {

// One audited cell: code hash h, compute time delta, checkpoint size sz and
// the raw system-event stream E.
struct CellRecord {
  std::string code_hash;
  Seconds delta = 0;
  Bytes size = 0;
  std::vector<EventRecord> events;
};

struct VersionTrace {
  std::string version_id;
  // Identifies the initial environment state ps_0.
  std::string environment_hash;
  std::vector<CellRecord> cells;
};

}  // namespace mvr
