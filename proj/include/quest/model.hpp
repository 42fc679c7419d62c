#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace quest {

using TimestampMs = std::int64_t;
using EpochId = std::int64_t;

/// Canonical form of a MAC-style device identifier: 12 uppercase hex digits.
/// Separators (':', '-', '.') are stripped and shorter hex strings are
/// left-padded with zeros, so "d1", "00:00:00:00:00:d1" and "0000000000D1"
/// all name the same device.
std::string canonicalize_device_id(std::string_view raw);

class DeviceId {
 public:
  DeviceId() = default;
  explicit DeviceId(std::string_view raw) : value_(canonicalize_device_id(raw)) {}

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const DeviceId&, const DeviceId&) = default;

 private:
  std::string value_;
};

/// Access-point identifier. Opaque, but must survive CSV and key=value files
/// unquoted, so it may not be empty or contain ',', '=', or whitespace.
class LocationId {
 public:
  LocationId() = default;
  explicit LocationId(std::string_view raw);

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const LocationId&, const LocationId&) = default;

 private:
  std::string value_;
};

struct ConnectivityEvent {
  DeviceId device;
  LocationId location;
  TimestampMs timestamp = 0;

  friend bool operator==(const ConnectivityEvent&, const ConnectivityEvent&) = default;
};

struct Epoch {
  EpochId id = 0;
  TimestampMs begin = 0;
  TimestampMs end = 0;
  std::vector<ConnectivityEvent> events;
};

/// Inclusive range of epoch ids.
struct EpochRange {
  EpochId first = 0;
  EpochId last = -1;

  bool empty() const noexcept { return last < first; }
  bool contains(EpochId id) const noexcept { return id >= first && id <= last; }
  std::int64_t size() const noexcept { return empty() ? 0 : last - first + 1; }

  friend bool operator==(const EpochRange&, const EpochRange&) = default;
};

struct SystemConfig {
  std::int64_t epoch_duration_s = 900;
  int digest_digits = 3;
  int alphabet_size = 16;
  int server_count = 9;
  std::uint64_t field_prime = (std::uint64_t{1} << 61) - 1;
  double distance_index = 0.125;
  std::map<LocationId, std::int64_t> capacities;
  int top_k = 5;
  // Every cQuest A_CL plaintext is padded to this many bytes.
  std::size_t acl_pad_bytes = 512;

  std::int64_t epoch_duration_ms() const noexcept { return epoch_duration_s * 1000; }

  /// Occupancy above which a (location, epoch) violates distancing.
  /// Throws ConfigError naming the location when no capacity is configured.
  double occupancy_threshold(const LocationId& location) const;

  void validate() const;
};

/// Origin of an event stream: the first timestamp rounded down to the epoch
/// duration.
TimestampMs stream_origin(TimestampMs first_timestamp, const SystemConfig& cfg);

/// floor((timestamp - origin) / duration). Throws RejectedEvent when the
/// event precedes the origin.
EpochId assign_epoch(const ConnectivityEvent& event, const SystemConfig& cfg,
                     TimestampMs origin);

bool is_prime(std::uint64_t n);

}  // namespace quest

template <>
struct std::hash<quest::DeviceId> {
  std::size_t operator()(const quest::DeviceId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

template <>
struct std::hash<quest::LocationId> {
  std::size_t operator()(const quest::LocationId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
