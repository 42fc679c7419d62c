#include "quest/oracle/oracle.hpp"

#include "quest/epoch_builder.hpp"
#include "quest/errors.hpp"

namespace quest::oracle {

using nlohmann::json;

CleartextRelation::CleartextRelation(const std::vector<Epoch>& epochs, SystemConfig cfg,
                                     OracleOptions options)
    : cfg_(std::move(cfg)), options_(options) {
  if (options_.window_ms <= 0) options_.window_ms = cfg_.epoch_duration_ms();
  for (const auto& ep : epochs) {
    auto& dst = events_[ep.id];
    dst.insert(dst.end(), ep.events.begin(), ep.events.end());
    for (const auto& ev : ep.events) present_[{ep.id, ev.location}].insert(ev.device);
  }
  if (!events_.empty()) full_ = {events_.begin()->first, events_.rbegin()->first};
}

CleartextRelation CleartextRelation::from_events(const std::vector<ConnectivityEvent>& events,
                                                 const SystemConfig& cfg, OracleOptions options) {
  return CleartextRelation(bucket_events(events, cfg), cfg, options);
}

std::set<LocationId> CleartextRelation::location_trace(const DeviceId& device,
                                                       EpochRange range) const {
  std::set<LocationId> out;
  if (range.empty()) return out;
  for (auto it = events_.lower_bound(range.first); it != events_.end() && it->first <= range.last;
       ++it) {
    for (const auto& ev : it->second) {
      if (ev.device == device) out.insert(ev.location);
    }
  }
  return out;
}

std::set<DeviceId> CleartextRelation::user_trace(const DeviceId& device, EpochRange range) const {
  std::set<DeviceId> out;
  if (range.empty()) return out;
  if (!options_.sliding_window) {
    for (auto it = events_.lower_bound(range.first); it != events_.end() && it->first <= range.last;
         ++it) {
      std::set<LocationId> visited;
      for (const auto& ev : it->second) {
        if (ev.device == device) visited.insert(ev.location);
      }
      for (const auto& l : visited) {
        const auto& devs = present_.at({it->first, l});
        out.insert(devs.begin(), devs.end());
      }
    }
  } else {
    std::vector<const ConnectivityEvent*> mine;
    std::vector<const ConnectivityEvent*> others;
    for (auto it = events_.lower_bound(range.first); it != events_.end() && it->first <= range.last;
         ++it) {
      for (const auto& ev : it->second) (ev.device == device ? mine : others).push_back(&ev);
    }
    for (const auto* o : others) {
      for (const auto* m : mine) {
        if (o->location == m->location && std::llabs(o->timestamp - m->timestamp) <= options_.window_ms) {
          out.insert(o->device);
          break;
        }
      }
    }
  }
  out.erase(device);
  return out;
}

OccupancyTable CleartextRelation::occupancy(EpochRange range) const {
  OccupancyTable out;
  for (const auto& [key, devs] : present_) {
    if (range.contains(key.first)) out[key] = static_cast<std::int64_t>(devs.size());
  }
  return out;
}

std::vector<Violation> CleartextRelation::social_distance(EpochRange range) const {
  auto violations = find_violations(occupancy(range), cfg_);
  for (auto& v : violations) {
    const auto& devs = present_.at({v.epoch_id, v.location});
    v.devices.assign(devs.begin(), devs.end());
  }
  return violations;
}

std::vector<CrowdFlowEntry> CleartextRelation::crowd_flow(EpochRange range, int k) const {
  if (k <= 0) throw ParameterError("crowd flow needs k >= 1, got " + std::to_string(k));
  std::map<LocationId, std::set<DeviceId>> seen;
  for (const auto& [key, devs] : present_) {
    if (range.contains(key.first)) seen[key.second].insert(devs.begin(), devs.end());
  }
  std::map<LocationId, std::int64_t> visitors;
  for (const auto& [loc, devs] : seen) visitors[loc] = static_cast<std::int64_t>(devs.size());
  return top_k(visitors, k);
}

json to_json(const std::set<LocationId>& v) {
  json out = json::array();
  for (const auto& l : v) out.push_back(l.str());
  return out;
}

json to_json(const std::set<DeviceId>& v) {
  json out = json::array();
  for (const auto& d : v) out.push_back(d.str());
  return out;
}

json to_json(const std::vector<Violation>& v) {
  json out = json::array();
  for (const auto& x : v) {
    json devs = json::array();
    for (const auto& d : x.devices) devs.push_back(d.str());
    out.push_back({{"location", x.location.str()},
                   {"epoch", x.epoch_id},
                   {"unique_count", x.unique_count},
                   {"devices", devs}});
  }
  return out;
}

json to_json(const std::vector<CrowdFlowEntry>& v) {
  json out = json::array();
  for (const auto& x : v) {
    out.push_back({{"location", x.location.str()}, {"unique_visitors", x.unique_visitors}});
  }
  return out;
}

}  // namespace quest::oracle
