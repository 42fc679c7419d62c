#include "quest/results.hpp"

#include <algorithm>

#include "quest/errors.hpp"

namespace quest {

std::vector<Violation> find_violations(const OccupancyTable& counts, const SystemConfig& cfg) {
  std::vector<Violation> out;
  for (const auto& [key, count] : counts) {
    if (count <= 0) continue;
    if (static_cast<double>(count) > cfg.occupancy_threshold(key.second)) {
      out.push_back({key.second, key.first, count, {}});
    }
  }
  return out;
}

std::vector<CrowdFlowEntry> top_k(const std::map<LocationId, std::int64_t>& visitors, int k) {
  if (k <= 0) throw ParameterError("top-k needs k >= 1, got " + std::to_string(k));
  std::vector<CrowdFlowEntry> all;
  for (const auto& [loc, n] : visitors) {
    if (n > 0) all.push_back({loc, n});
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.unique_visitors > b.unique_visitors;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
  return all;
}

}  // namespace quest
