#include "quest/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <tuple>

#include "quest/errors.hpp"

namespace quest {

namespace {

std::string hex12(std::uint64_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%012llX",
                static_cast<unsigned long long>(v & 0xFFFFFFFFFFFFULL));
  return buf;
}

std::string ap_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "AP-%03d", i);
  return buf;
}

}  // namespace

SyntheticDataset generate_synthetic_events(int device_count, int location_count, double days,
                                           const RateModel& rate, std::uint64_t seed) {
  if (device_count <= 0 || location_count <= 0 || !(days > 0.0)) {
    throw ParameterError("device_count, location_count and days must be positive");
  }
  if (!(rate.events_per_device_per_hour > 0.0)) {
    throw ParameterError("events_per_device_per_hour must be positive");
  }

  std::mt19937_64 rng(seed);
  SyntheticDataset out;

  for (int i = 0; i < location_count; ++i) out.locations.emplace_back(ap_name(i));
  out.hotspot = out.locations.front();

  std::set<std::string> used;
  while (static_cast<int>(out.devices.size()) < device_count) {
    auto id = hex12(rng());
    if (used.insert(id).second) out.devices.emplace_back(id);
  }

  std::vector<double> weights;
  for (int i = 0; i < location_count; ++i) {
    weights.push_back(1.0 / std::pow(static_cast<double>(i + 1), rate.hotspot_skew));
  }
  std::discrete_distribution<int> pick_location(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double mean_gap_ms = 3600.0 * 1000.0 / rate.events_per_device_per_hour;
  std::exponential_distribution<double> gap(1.0 / mean_gap_ms);
  const auto horizon = rate.start + static_cast<TimestampMs>(days * 86400.0 * 1000.0);

  for (const auto& device : out.devices) {
    int here = pick_location(rng);
    auto t = rate.start + static_cast<TimestampMs>(unit(rng) * mean_gap_ms);
    while (t < horizon) {
      out.events.push_back({device, out.locations[static_cast<std::size_t>(here)], t});
      if (location_count > 1 && unit(rng) < rate.move_probability) {
        int next = here;
        while (next == here) next = pick_location(rng);
        here = next;
      }
      t += 1 + static_cast<TimestampMs>(gap(rng));
    }
  }

  std::sort(out.events.begin(), out.events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.timestamp, a.device, a.location) < std::tie(b.timestamp, b.device, b.location);
  });
  if (rate.max_events != 0 && out.events.size() > rate.max_events) {
    out.events.resize(rate.max_events);
  }
  return out;
}

}  // namespace quest
