#include "quest/iquest/engine.hpp"

#include <chrono>

#include "quest/errors.hpp"
#include "quest/server/wire.hpp"
#include "quest/sss/searchable.hpp"

namespace quest::iquest {

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

// Epoch id of every row position in a program result.
std::vector<EpochId> row_epochs(const ProgramResult& r) {
  std::vector<EpochId> out;
  for (const auto& [x, rows] : r.epochs) out.insert(out.end(), rows, x);
  return out;
}

}  // namespace

IquestEngine::IquestEngine(SystemConfig cfg, Bytes digest_key,
                           std::vector<server::Channel*> servers,
                           std::unique_ptr<sss::RandomSource> rng)
    : cfg_(std::move(cfg)),
      field_(cfg_.field_prime),
      digester_(std::move(digest_key), cfg_.digest_digits),
      registry_(cfg_.digest_digits),
      servers_(std::move(servers)),
      rng_(std::move(rng)) {
  cfg_.validate();
  if (servers_.size() != static_cast<std::size_t>(cfg_.server_count)) {
    throw ConfigError("expected " + std::to_string(cfg_.server_count) + " server channels, got " +
                      std::to_string(servers_.size()));
  }
  for (std::size_t i = 0; i < servers_.size(); ++i) {
    if (servers_[i]->server_index() != static_cast<int>(i + 1)) {
      throw ConfigError("server channels must be ordered by index");
    }
  }
}

std::uint64_t IquestEngine::ingest_epoch(const Epoch& epoch, MeasurementRecord* record) {
  WallTimer timer(record);
  auto shares = create_shares_epoch(epoch, cfg_, digester_, registry_, field_, *rng_);
  std::uint64_t sent = 0;
  for (std::size_t s = 0; s < servers_.size(); ++s) {
    const Bytes req =
        server::encode(to_columns(epoch.id, static_cast<std::uint32_t>(s + 1), shares[s]));
    sent += req.size();
    server::decode_ack(servers_[s]->call(req, record));
  }
  return sent;
}

ProgramResult IquestEngine::run_program(server::Program program, EpochRange range,
                                        const std::vector<std::uint64_t>& query_codes,
                                        MeasurementRecord* record) {
  const auto n = static_cast<std::uint32_t>(servers_.size());
  const auto alphabet = static_cast<std::uint32_t>(cfg_.alphabet_size);
  // queries[q][s]: server s+1's fragment of query string q.
  std::vector<std::vector<sss::SssFragment>> queries;
  for (auto code : query_codes) {
    queries.push_back(
        sss::make_sss(field_, sss::hex_symbols(code_symbols(code, cfg_.digest_digits)), n, *rng_,
                      alphabet));
  }

  std::vector<server::ProgramResponse> responses;
  for (std::uint32_t s = 0; s < n; ++s) {
    server::ProgramRequest req{program, range, {}};
    for (auto& q : queries) req.queries.push_back(std::move(q[s]));
    try {
      responses.push_back(
          server::decode_program_response(servers_[s]->call(server::encode(req), record)));
    } catch (const ServerUnavailable&) {
    }
  }

  const std::uint32_t degree = responses.empty() ? 1 : responses.front().shares.degree;
  if (responses.size() < degree + 1) {
    throw ReconstructionThresholdError(
        std::string(server::program_name(program)) + " needs " + std::to_string(degree + 1) +
        " responsive servers, got " + std::to_string(responses.size()));
  }
  responses.resize(degree + 1);

  ProgramResult out;
  out.epochs = responses.front().epochs;
  const auto width = responses.front().shares.values.size();
  std::vector<std::uint64_t> xs;
  for (const auto& r : responses) {
    if (r.epochs != out.epochs || r.shares.values.size() != width || r.shares.degree != degree) {
      throw CrossServerError("servers disagree on the shape of their responses");
    }
    xs.push_back(r.shares.server_index);
    out.responders.push_back(static_cast<int>(r.shares.server_index));
  }
  last_response_shares_ = width;

  const sss::LagrangeAtZero lagrange(field_, xs);
  std::vector<sss::FieldElement> ys(responses.size());
  out.values.resize(width);
  for (std::size_t p = 0; p < width; ++p) {
    for (std::size_t s = 0; s < responses.size(); ++s) ys[s] = responses[s].shares.values[p];
    out.values[p] = lagrange.combine(ys);
  }
  return out;
}

void IquestEngine::require_verified(const DeviceId& device, publisher::Publisher& publisher) {
  if (!publisher.verify(device)) {
    throw UnauthorizedQuery("publisher did not confirm device " + device.str());
  }
}

std::map<EpochId, std::set<std::uint64_t>> IquestEngine::impacted(const DeviceId& device,
                                                                  EpochRange range,
                                                                  MeasurementRecord* record) {
  const auto r = run_program(server::Program::location_trace, range,
                             {digester_.query_value(device)}, record);
  const auto epochs = row_epochs(r);
  std::map<EpochId, std::set<std::uint64_t>> out;
  for (std::size_t j = 0; j < r.values.size(); ++j) {
    if (r.values[j].value != 0) out[epochs[j]].insert(r.values[j].value);
  }
  return out;
}

std::set<LocationId> IquestEngine::location_trace(const DeviceId& device, EpochRange range,
                                                  publisher::Publisher& publisher,
                                                  MeasurementRecord* record) {
  require_verified(device, publisher);
  WallTimer timer(record);
  std::set<LocationId> out;
  for (const auto& [x, codes] : impacted(device, range, record)) {
    for (auto c : codes) out.insert(registry_.location(c));
  }
  return out;
}

std::set<DeviceId> IquestEngine::user_trace(const DeviceId& device, EpochRange range,
                                            publisher::Publisher& publisher,
                                            MeasurementRecord* record) {
  require_verified(device, publisher);
  WallTimer timer(record);
  const auto places = impacted(device, range, record);
  std::set<std::uint64_t> distinct;
  for (const auto& [x, codes] : places) distinct.insert(codes.begin(), codes.end());
  const std::vector<std::uint64_t> codes(distinct.begin(), distinct.end());

  // Issued even when nothing was impacted, so every trace touches the same
  // rows in the same order.
  const auto r = run_program(server::Program::user_trace, range, codes, record);
  const auto epochs = row_epochs(r);
  const auto rows = epochs.size();
  const auto self = digester_.query_value(device);
  std::set<DeviceId> out;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    for (std::size_t j = 0; j < rows; ++j) {
      const auto v = r.values[i * rows + j].value;
      if (v == 0 || v == self) continue;
      auto at = places.find(epochs[j]);
      if (at == places.end() || !at->second.count(codes[i])) continue;
      if (auto d = digester_.reverse(v)) out.insert(*d);
    }
  }
  return out;
}

std::vector<IquestEngine::UniqueRow> IquestEngine::unique_rows(EpochRange range, bool with_devices,
                                                               MeasurementRecord* record) {
  const auto locs = run_program(server::Program::social_distance, range, {}, record);
  const auto epochs = row_epochs(locs);
  ProgramResult devs;
  if (with_devices) {
    devs = run_program(server::Program::offenders, range, {}, record);
    if (devs.epochs != locs.epochs) throw CrossServerError("store changed between programs");
  }
  std::vector<UniqueRow> out;
  for (std::size_t j = 0; j < locs.values.size(); ++j) {
    if (locs.values[j].value == 0) continue;
    out.push_back({epochs[j], locs.values[j].value, with_devices ? devs.values[j].value : 0});
  }
  return out;
}

std::vector<Violation> IquestEngine::social_distance(EpochRange range, bool aggregated,
                                                     bool include_devices,
                                                     MeasurementRecord* record) {
  WallTimer timer(record);
  OccupancyTable counts;
  std::map<std::pair<EpochId, LocationId>, std::vector<DeviceId>> devices;

  if (aggregated) {
    std::vector<std::uint64_t> codes;
    for (const auto& [loc, code] : registry_.entries()) codes.push_back(code);
    const auto r = run_program(server::Program::aggregated_sd, range, codes, record);
    const auto e = r.epochs.size();
    for (std::size_t i = 0; i < codes.size(); ++i) {
      for (std::size_t k = 0; k < e; ++k) {
        const auto v = r.values[i * e + k].value;
        if (v != 0) counts[{r.epochs[k].first, registry_.location(codes[i])}] = static_cast<std::int64_t>(v);
      }
    }
  } else {
    for (const auto& u : unique_rows(range, include_devices, record)) {
      const auto& loc = registry_.location(u.code);
      ++counts[{u.epoch, loc}];
      if (include_devices) {
        if (auto d = digester_.reverse(u.digest)) devices[{u.epoch, loc}].push_back(*d);
      }
    }
  }

  auto violations = find_violations(counts, cfg_);
  if (include_devices && !violations.empty()) {
    if (aggregated) {
      EpochRange sub{violations.front().epoch_id, violations.back().epoch_id};
      for (const auto& u : unique_rows(sub, true, record)) {
        if (auto d = digester_.reverse(u.digest)) {
          devices[{u.epoch, registry_.location(u.code)}].push_back(*d);
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

std::vector<CrowdFlowEntry> IquestEngine::crowd_flow(EpochRange range, int k, bool aggregated,
                                                     MeasurementRecord* record) {
  if (k <= 0) throw ParameterError("crowd flow needs k >= 1, got " + std::to_string(k));
  WallTimer timer(record);
  std::map<LocationId, std::int64_t> visitors;
  if (aggregated && range.size() == 1) {
    std::vector<std::uint64_t> codes;
    for (const auto& [loc, code] : registry_.entries()) codes.push_back(code);
    const auto r = run_program(server::Program::aggregated_sd, range, codes, record);
    const auto e = r.epochs.size();
    for (std::size_t i = 0; i < codes.size(); ++i) {
      for (std::size_t x = 0; x < e; ++x) {
        visitors[registry_.location(codes[i])] += static_cast<std::int64_t>(r.values[i * e + x].value);
      }
    }
    return top_k(visitors, k);
  }
  std::map<LocationId, std::set<std::uint64_t>> seen;
  for (const auto& u : unique_rows(range, true, record)) seen[registry_.location(u.code)].insert(u.digest);
  for (const auto& [loc, ds] : seen) visitors[loc] = static_cast<std::int64_t>(ds.size());
  return top_k(visitors, k);
}

std::vector<DeviceId> IquestEngine::notify(const std::set<DeviceId>& ids,
                                           publisher::NotificationRegistry& registry) const {
  return registry.record_notifications(ids);
}

}  // namespace quest::iquest
