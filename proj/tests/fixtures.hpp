#pragma once

// Shared test data and independent reference computations. Nothing here
// calls into the code paths it is used to check: modular arithmetic, the
// encryption shadow and the query scans are written out from scratch.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quest/cquest/engine.hpp"
#include "quest/epoch_builder.hpp"
#include "quest/iquest/engine.hpp"
#include "quest/model.hpp"
#include "quest/publisher/publisher.hpp"
#include "quest/server/cluster.hpp"
#include "quest/sss/rng.hpp"

namespace fixtures {

using namespace quest;

inline constexpr TimestampMs kT0 = 1583020800000;  // an epoch boundary for 900 s epochs

// ---- the four-row worked epoch: d1@l1, d2@l2, d1@l2, d1@l1 ----

inline std::vector<ConnectivityEvent> worked_events() {
  return {
      {DeviceId("d1"), LocationId("l1"), kT0 + 1000},
      {DeviceId("d2"), LocationId("l2"), kT0 + 2000},
      {DeviceId("d1"), LocationId("l2"), kT0 + 3000},
      {DeviceId("d1"), LocationId("l1"), kT0 + 4000},
  };
}

/// Capacity 8 at 0.125 puts the alarm threshold at one occupant.
inline SystemConfig worked_config() {
  SystemConfig cfg;
  cfg.capacities[LocationId("l1")] = 8;
  cfg.capacities[LocationId("l2")] = 8;
  return cfg;
}

inline Epoch worked_epoch() {
  Epoch e;
  e.id = 0;
  e.begin = kT0;
  e.end = kT0 + 900'000;
  e.events = worked_events();
  return e;
}

// ---- modular arithmetic without PrimeField ----

__extension__ typedef unsigned __int128 wide;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<wide>(a) * b) % p);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  b %= p;
  while (e) {
    if (e & 1) r = mulmod(r, b, p);
    b = mulmod(b, b, p);
    e >>= 1;
  }
  return r;
}

/// Textbook Lagrange at x = 0 with Fermat inverses.
inline std::uint64_t naive_interpolate(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pts,
                                       std::uint64_t p) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::uint64_t num = 1, den = 1;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      num = mulmod(num, (p - pts[j].first % p) % p, p);
      den = mulmod(den, (pts[i].first % p + p - pts[j].first % p) % p, p);
    }
    acc = (acc + mulmod(pts[i].second % p, mulmod(num, powmod(den, p - 2, p), p), p)) % p;
  }
  return acc;
}

// ---- cleartext replay of the epoch encryption ----

struct ShadowRow {
  bool first = false;      // device's first row in the epoch
  bool unique = false;     // device's first row at this location
  std::int64_t y = 0;      // 1-based row number
  std::uint64_t counter = 0;
  std::optional<std::vector<std::string>> locations;  // on first rows only
};

inline std::vector<ShadowRow> shadow_encrypt(const Epoch& e) {
  std::vector<ShadowRow> out;
  std::map<std::string, std::vector<std::string>> visited;
  std::map<std::string, std::uint64_t> counters;
  std::map<std::string, std::vector<std::string>> full;
  for (const auto& ev : e.events) {
    auto& l = full[ev.device.str()];
    if (std::find(l.begin(), l.end(), ev.location.str()) == l.end()) l.push_back(ev.location.str());
  }
  std::int64_t y = 0;
  for (const auto& ev : e.events) {
    ShadowRow r;
    r.y = ++y;
    const auto d = ev.device.str();
    const auto l = ev.location.str();
    r.first = !visited.count(d);
    auto& v = visited[d];
    r.unique = std::find(v.begin(), v.end(), l) == v.end();
    if (r.unique) v.push_back(l);
    r.counter = ++counters[l];
    if (r.first) r.locations = full[d];
    out.push_back(r);
  }
  return out;
}

// ---- second implementations of the cleartext queries ----

inline EpochId naive_epoch(TimestampMs ts, TimestampMs origin, const SystemConfig& cfg) {
  return (ts - origin) / cfg.epoch_duration_ms();
}

inline TimestampMs naive_origin(const std::vector<ConnectivityEvent>& evs, const SystemConfig& cfg) {
  TimestampMs first = evs.front().timestamp;
  for (const auto& e : evs) first = std::min(first, e.timestamp);
  return first - first % cfg.epoch_duration_ms();
}

/// O(n^2) pair scan: devices that share (location, epoch) with `d`.
inline std::set<DeviceId> pair_scan_contacts(const std::vector<ConnectivityEvent>& evs,
                                             const SystemConfig& cfg, const DeviceId& d,
                                             EpochRange range) {
  const auto origin = naive_origin(evs, cfg);
  std::set<DeviceId> out;
  for (const auto& a : evs) {
    if (a.device != d) continue;
    const auto ea = naive_epoch(a.timestamp, origin, cfg);
    if (!range.contains(ea)) continue;
    for (const auto& b : evs) {
      if (b.device == d || b.location != a.location) continue;
      if (naive_epoch(b.timestamp, origin, cfg) == ea) out.insert(b.device);
    }
  }
  return out;
}

inline std::set<LocationId> scan_locations(const std::vector<ConnectivityEvent>& evs,
                                           const SystemConfig& cfg, const DeviceId& d,
                                           EpochRange range) {
  const auto origin = naive_origin(evs, cfg);
  std::set<LocationId> out;
  for (const auto& e : evs) {
    if (e.device == d && range.contains(naive_epoch(e.timestamp, origin, cfg))) out.insert(e.location);
  }
  return out;
}

/// Hash-set tabulation of distinct devices per (epoch, location).
inline std::map<std::pair<EpochId, std::string>, std::size_t> hash_tabulate(
    const std::vector<ConnectivityEvent>& evs, const SystemConfig& cfg, EpochRange range) {
  const auto origin = naive_origin(evs, cfg);
  std::unordered_map<std::string, std::set<std::string>> buckets;
  for (const auto& e : evs) {
    const auto x = naive_epoch(e.timestamp, origin, cfg);
    if (!range.contains(x)) continue;
    buckets[std::to_string(x) + "|" + e.location.str()].insert(e.device.str());
  }
  std::map<std::pair<EpochId, std::string>, std::size_t> out;
  for (const auto& [k, devs] : buckets) {
    const auto bar = k.find('|');
    out[{std::stoll(k.substr(0, bar)), k.substr(bar + 1)}] = devs.size();
  }
  return out;
}

// ---- deployments ----

inline Bytes key_bytes(std::uint64_t seed, std::size_t n = 32) {
  sss::SeededRng rng(seed);
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.next_u64());
  return out;
}

struct CquestRig {
  server::CquestCluster cluster;
  std::unique_ptr<cquest::CquestEngine> engine;
  sss::SeededRng rng;

  CquestRig(const SystemConfig& cfg, cquest::UniquenessForm form, std::uint64_t seed,
            std::uint64_t org = 2)
      : rng(seed) {
    std::optional<cquest::AttributeKey> outer;
    if (form == cquest::UniquenessForm::expandable) {
      outer = cquest::AttributeKey{key_bytes(seed ^ 0x5eed)};
      cluster.server.set_outer_key(*outer);
    }
    engine = std::make_unique<cquest::CquestEngine>(cfg, key_bytes(1), key_bytes(org),
                                                    cluster.channel, form, outer);
  }

  void ingest(const std::vector<Epoch>& epochs) {
    for (const auto& e : epochs) engine->ingest_epoch(e, rng);
  }
};

struct IquestRig {
  server::IquestCluster cluster;
  std::unique_ptr<iquest::IquestEngine> engine;

  IquestRig(const SystemConfig& cfg, std::uint64_t seed) : cluster(cfg) {
    engine = std::make_unique<iquest::IquestEngine>(cfg, key_bytes(seed ^ 0xd1), cluster.channels(),
                                                    std::make_unique<sss::SeededRng>(seed));
  }

  void ingest(const std::vector<Epoch>& epochs) {
    for (const auto& e : epochs) engine->ingest_epoch(e);
  }
};

inline publisher::Publisher publisher_for(const std::vector<DeviceId>& infected) {
  return publisher::Publisher::from_ids(infected, "test-salt", kT0);
}

/// Capacity for every location such that the alarm threshold is `threshold`
/// occupants.
inline SystemConfig config_with_threshold(const std::vector<LocationId>& locations, int threshold) {
  SystemConfig cfg;
  for (const auto& l : locations) cfg.capacities[l] = 8 * threshold;
  return cfg;
}

}  // namespace fixtures
