#pragma once

#include <map>
#include <set>
#include <vector>

#include <json.hpp>

#include "quest/model.hpp"
#include "quest/results.hpp"

namespace quest::oracle {

struct OracleOptions {
  // Contacts are same-epoch co-presence by default. With a sliding window,
  // two devices are in contact when they hit the same location within
  // +/- window_ms of each other (0 means one epoch duration).
  bool sliding_window = false;
  TimestampMs window_ms = 0;
};

/// The four applications computed directly over cleartext events.
class CleartextRelation {
 public:
  CleartextRelation(const std::vector<Epoch>& epochs, SystemConfig cfg, OracleOptions options = {});
  static CleartextRelation from_events(const std::vector<ConnectivityEvent>& events,
                                       const SystemConfig& cfg, OracleOptions options = {});

  std::set<LocationId> location_trace(const DeviceId& device, EpochRange range) const;
  std::set<DeviceId> user_trace(const DeviceId& device, EpochRange range) const;
  /// Always lists offending devices.
  std::vector<Violation> social_distance(EpochRange range) const;
  std::vector<CrowdFlowEntry> crowd_flow(EpochRange range, int k) const;

  /// Distinct devices per (epoch, location).
  OccupancyTable occupancy(EpochRange range) const;

  EpochRange full_range() const noexcept { return full_; }
  const std::map<EpochId, std::vector<ConnectivityEvent>>& epochs() const noexcept {
    return events_;
  }

 private:
  SystemConfig cfg_;
  OracleOptions options_;
  EpochRange full_;
  std::map<EpochId, std::vector<ConnectivityEvent>> events_;
  std::map<std::pair<EpochId, LocationId>, std::set<DeviceId>> present_;
};

nlohmann::json to_json(const std::set<LocationId>& v);
nlohmann::json to_json(const std::set<DeviceId>& v);
nlohmann::json to_json(const std::vector<Violation>& v);
nlohmann::json to_json(const std::vector<CrowdFlowEntry>& v);

}  // namespace quest::oracle
