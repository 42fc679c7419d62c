#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "quest/cquest/encrypter.hpp"
#include "quest/measurement.hpp"
#include "quest/publisher/publisher.hpp"
#include "quest/results.hpp"
#include "quest/server/channel.hpp"

namespace quest::cquest {

/// Bound on the counter m in user-trace trapdoors E(l, m, x).
enum class CounterMode : std::uint8_t {
  global_max = 0,          // c_max over every epoch ingested so far
  per_epoch = 1,           // the epoch's largest counter
  per_epoch_location = 2,  // the final counter of (epoch, location)
};

/// How social distancing and crowd flow obtain unique rows.
enum class UniquenessMode : std::uint8_t {
  baseline = 0,  // client-generated trapdoors for y = 1..max rows
  token = 1,     // one inner token per epoch, expanded by the server
  htab = 2,      // outsourced per-epoch location tables
};

/// The trusted Quest host for the cQuest protocol: encrypts sealed epochs,
/// keeps their counters, and runs the four applications against one
/// untrusted server reached over `server`.
class CquestEngine {
 public:
  CquestEngine(SystemConfig cfg, Bytes s_q, Bytes k_pko, server::Channel& server,
               UniquenessForm form = UniquenessForm::direct,
               std::optional<AttributeKey> outer = std::nullopt);

  const SystemConfig& config() const noexcept { return cfg_; }
  const CipherSuite& suite() const noexcept { return suite_; }
  UniquenessForm uniqueness_form() const noexcept { return form_; }

  /// Encrypts the epoch, uploads it, and keeps its counters.
  EpochMetadata ingest_epoch(const Epoch& epoch, sss::RandomSource& rng,
                             MeasurementRecord* record = nullptr);

  /// Throws UnauthorizedQuery, before contacting the server, when the
  /// publisher does not confirm the device.
  std::set<LocationId> location_trace(const DeviceId& device, EpochRange range,
                                      publisher::Publisher& publisher,
                                      MeasurementRecord* record = nullptr);

  std::set<DeviceId> user_trace(const DeviceId& device, EpochRange range,
                                publisher::Publisher& publisher, CounterMode mode,
                                MeasurementRecord* record = nullptr);

  std::vector<Violation> social_distance(EpochRange range, UniquenessMode mode,
                                         bool include_devices = false,
                                         MeasurementRecord* record = nullptr);

  std::vector<CrowdFlowEntry> crowd_flow(EpochRange range, int k, UniquenessMode mode,
                                         MeasurementRecord* record = nullptr);

  std::vector<DeviceId> notify(const std::set<DeviceId>& ids,
                               publisher::NotificationRegistry& registry) const;

  /// Trapdoors sent by the most recent query.
  std::size_t last_trapdoor_count() const noexcept { return last_trapdoors_; }
  std::uint64_t global_max_counter() const noexcept { return c_max_; }
  const std::map<EpochId, EpochMetadata>& metadata() const noexcept { return metadata_; }

  /// Counter store as (epoch_id, encrypted blob) records.
  std::vector<std::pair<EpochId, Bytes>> export_counters() const;
  void import_counters(const std::vector<std::pair<EpochId, Bytes>>& records);

  const Bytes& secret() const noexcept { return s_q_; }
  const Bytes& organization_key() const noexcept { return k_pko_; }

 private:
  std::vector<EpochId> epochs_in(EpochRange range) const;
  std::map<EpochId, std::vector<LocationId>> impacted(const DeviceId& device, EpochRange range,
                                                      MeasurementRecord* record);
  struct UniqueRow {
    EpochId epoch;
    LocationId location;
    std::optional<DeviceId> device;
  };
  std::vector<UniqueRow> fetch_unique_rows(const std::vector<EpochId>& epochs, UniquenessMode mode,
                                           bool include_devices, MeasurementRecord* record);
  void require_verified(const DeviceId& device, publisher::Publisher& publisher);

  SystemConfig cfg_;
  Bytes s_q_;
  Bytes k_pko_;
  CipherSuite suite_;
  server::Channel* server_;
  UniquenessForm form_;
  std::map<EpochId, EpochMetadata> metadata_;
  std::uint64_t c_max_ = 0;
  std::size_t last_trapdoors_ = 0;
};

}  // namespace quest::cquest
