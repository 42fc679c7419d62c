#include "quest/cquest/engine.hpp"

#include <chrono>

#include "quest/cquest/tuple_codec.hpp"
#include "quest/errors.hpp"
#include "quest/server/wire.hpp"

namespace quest::cquest {

namespace {

class WallTimer {
 public:
  explicit WallTimer(MeasurementRecord* r) : r_(r), t0_(std::chrono::steady_clock::now()) {}
  ~WallTimer() {
    if (r_ && !r_->sealed()) r_->set_wall_time(r_->wall_time() + (std::chrono::steady_clock::now() - t0_));
  }
  WallTimer(const WallTimer&) = delete;
  WallTimer& operator=(const WallTimer&) = delete;

 private:
  MeasurementRecord* r_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace

CquestEngine::CquestEngine(SystemConfig cfg, Bytes s_q, Bytes k_pko, server::Channel& server,
                           UniquenessForm form, std::optional<AttributeKey> outer)
    : cfg_(std::move(cfg)),
      s_q_(std::move(s_q)),
      k_pko_(std::move(k_pko)),
      suite_(s_q_, k_pko_, std::move(outer)),
      server_(&server),
      form_(form) {
  if (form_ == UniquenessForm::expandable && !suite_.has_outer()) {
    throw KeyDerivationError("the expandable uniqueness form needs an outer key");
  }
}

EpochMetadata CquestEngine::ingest_epoch(const Epoch& epoch, sss::RandomSource& rng,
                                         MeasurementRecord* record) {
  if (metadata_.count(epoch.id)) {
    throw IngestionError("epoch " + std::to_string(epoch.id) + " was already ingested");
  }
  WallTimer timer(record);
  auto enc = encrypt_epoch(epoch, suite_, {form_, cfg_.acl_pad_bytes}, rng);
  server::CIngestRequest req{enc.epoch_id, std::move(enc.rows), std::move(enc.htab_counts),
                             std::move(enc.htab_members)};
  server::decode_ack(server_->call(server::encode(req), record));
  c_max_ = std::max(c_max_, enc.metadata.max_counter);
  metadata_[epoch.id] = enc.metadata;
  return enc.metadata;
}

std::vector<EpochId> CquestEngine::epochs_in(EpochRange range) const {
  std::vector<EpochId> out;
  if (range.empty()) return out;
  for (auto it = metadata_.lower_bound(range.first); it != metadata_.end() && it->first <= range.last;
       ++it) {
    if (it->second.row_count > 0) out.push_back(it->first);
  }
  return out;
}

void CquestEngine::require_verified(const DeviceId& device, publisher::Publisher& publisher) {
  if (!publisher.verify(device)) {
    throw UnauthorizedQuery("publisher did not confirm device " + device.str());
  }
}

std::map<EpochId, std::vector<LocationId>> CquestEngine::impacted(const DeviceId& device,
                                                                  EpochRange range,
                                                                  MeasurementRecord* record) {
  server::SelectRequest req;
  req.column = server::CColumn::a_id;
  req.range = range;
  req.project = {server::CColumn::a_cl};
  for (auto x : epochs_in(range)) {
    req.tokens.push_back(suite_.id().encrypt(device_first_plaintext(device, x)));
  }
  last_trapdoors_ = req.tokens.size();
  std::map<EpochId, std::vector<LocationId>> out;
  if (req.tokens.empty()) return out;

  const auto resp = server::decode_select_response(server_->call(server::encode(req), record));
  for (const auto& row : resp.rows) {
    auto list = decode_combined_locations(suite_.combined_locations().decrypt(row.cells.at(0)));
    if (!list) continue;  // Fake payloads never match a first-appearance token
    auto& dst = out[row.epoch_id];
    dst.insert(dst.end(), list->begin(), list->end());
  }
  return out;
}

std::set<LocationId> CquestEngine::location_trace(const DeviceId& device, EpochRange range,
                                                  publisher::Publisher& publisher,
                                                  MeasurementRecord* record) {
  require_verified(device, publisher);
  WallTimer timer(record);
  std::set<LocationId> out;
  for (const auto& [x, locs] : impacted(device, range, record)) out.insert(locs.begin(), locs.end());
  return out;
}

std::set<DeviceId> CquestEngine::user_trace(const DeviceId& device, EpochRange range,
                                            publisher::Publisher& publisher, CounterMode mode,
                                            MeasurementRecord* record) {
  require_verified(device, publisher);
  WallTimer timer(record);
  const auto places = impacted(device, range, record);
  std::size_t trapdoors = last_trapdoors_;

  server::SelectRequest req;
  req.column = server::CColumn::a_l;
  req.range = range;
  req.project = {server::CColumn::a_id};
  for (const auto& [x, locs] : places) {
    const auto& meta = metadata_.at(x);
    for (const auto& l : locs) {
      std::uint64_t bound = 0;
      switch (mode) {
        case CounterMode::global_max: bound = c_max_; break;
        case CounterMode::per_epoch: bound = meta.max_counter; break;
        case CounterMode::per_epoch_location: {
          auto it = meta.location_counters.find(l);
          bound = it == meta.location_counters.end() ? 0 : it->second;
          break;
        }
      }
      for (std::uint64_t m = 1; m <= bound; ++m) {
        req.tokens.push_back(suite_.location().encrypt(location_plaintext(l, m, x)));
      }
    }
  }
  trapdoors += req.tokens.size();
  last_trapdoors_ = trapdoors;

  std::set<DeviceId> out;
  if (req.tokens.empty()) return out;
  const auto resp = server::decode_select_response(server_->call(server::encode(req), record));
  for (const auto& row : resp.rows) {
    auto d = decode_device(suite_.id().decrypt(row.cells.at(0))).device;
    if (d != device) out.insert(std::move(d));
  }
  return out;
}

std::vector<CquestEngine::UniqueRow> CquestEngine::fetch_unique_rows(
    const std::vector<EpochId>& epochs, UniquenessMode mode, bool include_devices,
    MeasurementRecord* record) {
  std::vector<server::CColumn> project{server::CColumn::a_l};
  if (include_devices) project.push_back(server::CColumn::a_id);

  Bytes request;
  if (mode == UniquenessMode::baseline) {
    server::SelectRequest req;
    req.column = server::CColumn::a_u;
    req.range = epochs.empty() ? EpochRange{} : EpochRange{epochs.front(), epochs.back()};
    req.project = project;
    std::uint64_t max_rows = 0;
    for (auto x : epochs) max_rows = std::max(max_rows, metadata_.at(x).row_count);
    for (auto x : epochs) {
      for (std::uint64_t y = 1; y <= max_rows; ++y) {
        req.tokens.push_back(unique_token(suite_, form_, static_cast<std::int64_t>(y), x));
      }
    }
    last_trapdoors_ = req.tokens.size();
    if (req.tokens.empty()) return {};
    request = server::encode(req);
  } else {
    if (form_ != UniquenessForm::expandable) {
      throw CapabilityError("server-side token expansion needs data ingested in expandable form");
    }
    server::ExpandRequest req;
    req.project = project;
    for (auto x : epochs) req.gammas.emplace_back(x, unique_gamma(suite_, x));
    last_trapdoors_ = req.gammas.size();
    if (req.gammas.empty()) return {};
    request = server::encode(req);
  }

  const auto resp = server::decode_select_response(server_->call(request, record));
  std::vector<UniqueRow> out;
  out.reserve(resp.rows.size());
  for (const auto& row : resp.rows) {
    const auto lp = decode_location(suite_.location().decrypt(row.cells.at(0)));
    UniqueRow u{lp.epoch, lp.location, std::nullopt};
    if (include_devices) u.device = decode_device(suite_.id().decrypt(row.cells.at(1))).device;
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Violation> CquestEngine::social_distance(EpochRange range, UniquenessMode mode,
                                                     bool include_devices,
                                                     MeasurementRecord* record) {
  WallTimer timer(record);
  const auto epochs = epochs_in(range);
  OccupancyTable counts;
  std::map<std::pair<EpochId, LocationId>, std::vector<DeviceId>> devices;

  if (mode == UniquenessMode::htab) {
    server::HtabRequest req{server::HtabKind::counts, epochs};
    last_trapdoors_ = epochs.size();
    if (!epochs.empty()) {
      const auto resp = server::decode_htab_response(server_->call(server::encode(req), record));
      for (const auto& [x, blob] : resp.blobs) {
        for (const auto& lc : decode_htab_counts(suite_, blob).locations) {
          counts[{x, lc.location}] = static_cast<std::int64_t>(lc.unique_devices);
        }
      }
    }
  } else {
    for (auto& u : fetch_unique_rows(epochs, mode, include_devices, record)) {
      ++counts[{u.epoch, u.location}];
      if (u.device) devices[{u.epoch, u.location}].push_back(std::move(*u.device));
    }
  }

  auto violations = find_violations(counts, cfg_);
  if (include_devices && !violations.empty()) {
    if (mode == UniquenessMode::htab) {
      server::HtabRequest req{server::HtabKind::members, {}};
      for (const auto& v : violations) {
        if (req.epochs.empty() || req.epochs.back() != v.epoch_id) req.epochs.push_back(v.epoch_id);
      }
      const auto resp = server::decode_htab_response(server_->call(server::encode(req), record));
      for (const auto& [x, blob] : resp.blobs) {
        for (auto& [loc, devs] : decode_htab_members(suite_, blob).members) {
          devices[{x, loc}] = std::move(devs);
        }
      }
    }
    for (auto& v : violations) {
      v.devices = devices[{v.epoch_id, v.location}];
      std::sort(v.devices.begin(), v.devices.end());
    }
  }
  return violations;
}

std::vector<CrowdFlowEntry> CquestEngine::crowd_flow(EpochRange range, int k, UniquenessMode mode,
                                                     MeasurementRecord* record) {
  if (k <= 0) throw ParameterError("crowd flow needs k >= 1, got " + std::to_string(k));
  WallTimer timer(record);
  const auto epochs = epochs_in(range);
  std::map<LocationId, std::int64_t> visitors;

  if (mode == UniquenessMode::htab && epochs.size() == 1) {
    server::HtabRequest req{server::HtabKind::counts, epochs};
    last_trapdoors_ = 1;
    const auto resp = server::decode_htab_response(server_->call(server::encode(req), record));
    for (const auto& [x, blob] : resp.blobs) {
      for (const auto& lc : decode_htab_counts(suite_, blob).locations) {
        visitors[lc.location] = static_cast<std::int64_t>(lc.unique_devices);
      }
    }
    return top_k(visitors, k);
  }

  std::map<LocationId, std::set<DeviceId>> seen;
  if (mode == UniquenessMode::htab) {
    server::HtabRequest req{server::HtabKind::members, epochs};
    last_trapdoors_ = epochs.size();
    if (!epochs.empty()) {
      const auto resp = server::decode_htab_response(server_->call(server::encode(req), record));
      for (const auto& [x, blob] : resp.blobs) {
        for (const auto& [loc, devs] : decode_htab_members(suite_, blob).members) {
          seen[loc].insert(devs.begin(), devs.end());
        }
      }
    }
  } else {
    for (auto& u : fetch_unique_rows(epochs, mode, true, record)) {
      seen[u.location].insert(std::move(*u.device));
    }
  }
  for (const auto& [loc, devs] : seen) visitors[loc] = static_cast<std::int64_t>(devs.size());
  return top_k(visitors, k);
}

std::vector<DeviceId> CquestEngine::notify(const std::set<DeviceId>& ids,
                                           publisher::NotificationRegistry& registry) const {
  return registry.record_notifications(ids);
}

std::vector<std::pair<EpochId, Bytes>> CquestEngine::export_counters() const {
  std::vector<std::pair<EpochId, Bytes>> out;
  for (const auto& [x, m] : metadata_) {
    ByteWriter w;
    w.i64(x);
    w.u64(m.row_count);
    w.u64(m.device_count);
    w.u64(m.max_counter);
    w.u64(m.table_bytes);
    w.u32(static_cast<std::uint32_t>(m.location_counters.size()));
    for (const auto& [l, c] : m.location_counters) {
      w.str(l.str());
      w.u64(c);
    }
    out.emplace_back(x, suite_.location_table().encrypt(w.buffer()));
  }
  return out;
}

void CquestEngine::import_counters(const std::vector<std::pair<EpochId, Bytes>>& records) {
  for (const auto& [x, blob] : records) {
    const Bytes plain = suite_.location_table().decrypt(blob);
    ByteReader r(plain);
    EpochMetadata m;
    m.epoch_id = r.i64();
    if (m.epoch_id != x) throw FormatError("counter record filed under the wrong epoch");
    m.row_count = r.u64();
    m.device_count = r.u64();
    m.max_counter = r.u64();
    m.table_bytes = r.u64();
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      LocationId l(r.str());
      m.location_counters[l] = r.u64();
    }
    r.expect_done();
    c_max_ = std::max(c_max_, m.max_counter);
    metadata_[x] = std::move(m);
  }
}

}  // namespace quest::cquest
