#pragma once

#include <memory>
#include <set>
#include <vector>

#include "quest/iquest/digest.hpp"
#include "quest/iquest/share_creation.hpp"
#include "quest/measurement.hpp"
#include "quest/publisher/publisher.hpp"
#include "quest/results.hpp"
#include "quest/server/channel.hpp"
#include "quest/sss/field.hpp"
#include "quest/sss/rng.hpp"

namespace quest::iquest {

/// Reconstructed output of one server program.
struct ProgramResult {
  std::vector<std::pair<EpochId, std::uint32_t>> epochs;
  std::vector<sss::FieldElement> values;
  std::vector<int> responders;  // server indexes used for interpolation
};

/// The trusted Quest host for the iQuest protocol. Shares sealed epochs
/// across N servers and answers the four applications by sending every
/// server the same program and interpolating the results.
class IquestEngine {
 public:
  IquestEngine(SystemConfig cfg, Bytes digest_key, std::vector<server::Channel*> servers,
               std::unique_ptr<sss::RandomSource> rng);

  const SystemConfig& config() const noexcept { return cfg_; }
  const sss::PrimeField& field() const noexcept { return field_; }
  DeviceDigester& digester() noexcept { return digester_; }
  const DeviceDigester& digester() const noexcept { return digester_; }
  LocationRegistry& registry() noexcept { return registry_; }
  const LocationRegistry& registry() const noexcept { return registry_; }

  /// Shares the epoch and uploads each server's columns. Returns the bytes
  /// sent to all servers together.
  std::uint64_t ingest_epoch(const Epoch& epoch, MeasurementRecord* record = nullptr);

  std::set<LocationId> location_trace(const DeviceId& device, EpochRange range,
                                      publisher::Publisher& publisher,
                                      MeasurementRecord* record = nullptr);

  std::set<DeviceId> user_trace(const DeviceId& device, EpochRange range,
                                publisher::Publisher& publisher,
                                MeasurementRecord* record = nullptr);

  std::vector<Violation> social_distance(EpochRange range, bool aggregated,
                                         bool include_devices = false,
                                         MeasurementRecord* record = nullptr);

  std::vector<CrowdFlowEntry> crowd_flow(EpochRange range, int k, bool aggregated,
                                         MeasurementRecord* record = nullptr);

  std::vector<DeviceId> notify(const std::set<DeviceId>& ids,
                               publisher::NotificationRegistry& registry) const;

  /// Sends `program` to every online server, each with its own fragments of
  /// the query strings, and interpolates position-wise. Throws
  /// ReconstructionThresholdError when fewer than degree + 1 servers answer.
  ProgramResult run_program(server::Program program, EpochRange range,
                            const std::vector<std::uint64_t>& query_codes,
                            MeasurementRecord* record);

  /// Per-server response share counts of the most recent program.
  std::size_t last_response_shares() const noexcept { return last_response_shares_; }

 private:
  void require_verified(const DeviceId& device, publisher::Publisher& publisher);
  std::map<EpochId, std::set<std::uint64_t>> impacted(const DeviceId& device, EpochRange range,
                                                      MeasurementRecord* record);
  struct UniqueRow {
    EpochId epoch;
    std::uint64_t code;
    std::uint64_t digest;
  };
  std::vector<UniqueRow> unique_rows(EpochRange range, bool with_devices,
                                     MeasurementRecord* record);

  SystemConfig cfg_;
  sss::PrimeField field_;
  DeviceDigester digester_;
  LocationRegistry registry_;
  std::vector<server::Channel*> servers_;
  std::unique_ptr<sss::RandomSource> rng_;
  std::size_t last_response_shares_ = 0;
};

}  // namespace quest::iquest
