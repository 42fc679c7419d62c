#pragma once

#include <cstdint>
#include <vector>

#include "quest/model.hpp"

namespace quest {

/// Shape of the synthetic association stream.
struct RateModel {
  double events_per_device_per_hour = 16.0;
  // Probability that a device's next association is at a different AP.
  double move_probability = 0.3;
  // Zipf exponent over location popularity; location 0 is the hotspot.
  double hotspot_skew = 1.0;
  // Truncate the merged stream to this many events (0 = no limit).
  std::size_t max_events = 0;
  TimestampMs start = 1583020800000;  // 2020-03-01T00:00:00Z
};

struct SyntheticDataset {
  std::vector<ConnectivityEvent> events;  // sorted by timestamp
  std::vector<DeviceId> devices;
  std::vector<LocationId> locations;
  LocationId hotspot;  // the most popular location by construction
};

/// Reproducible WiFi association stream. Each device homes at a location
/// drawn from the popularity distribution and hops between APs as a Poisson
/// process, so devices visit several locations inside one epoch.
SyntheticDataset generate_synthetic_events(int device_count, int location_count, double days,
                                           const RateModel& rate, std::uint64_t seed);

}  // namespace quest
