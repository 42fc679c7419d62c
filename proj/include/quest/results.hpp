#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "quest/model.hpp"

namespace quest {

/// A (location, epoch) whose distinct-device count exceeded
/// capacity * distance_index. `devices` is filled only when the caller asked
/// for offending device ids.
struct Violation {
  LocationId location;
  EpochId epoch_id = 0;
  std::int64_t unique_count = 0;
  std::vector<DeviceId> devices;  // sorted

  friend bool operator==(const Violation&, const Violation&) = default;
};

using OccupancyTable = std::map<std::pair<EpochId, LocationId>, std::int64_t>;

/// Violations sorted by (epoch, location).
std::vector<Violation> find_violations(const OccupancyTable& counts, const SystemConfig& cfg);

struct CrowdFlowEntry {
  LocationId location;
  std::int64_t unique_visitors = 0;

  friend bool operator==(const CrowdFlowEntry&, const CrowdFlowEntry&) = default;
};

/// Descending by count, ties by ascending location id, truncated to k.
/// Throws ParameterError when k <= 0.
std::vector<CrowdFlowEntry> top_k(const std::map<LocationId, std::int64_t>& visitors, int k);

}  // namespace quest
