#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

#include "quest/bytes.hpp"
#include "quest/model.hpp"

namespace quest::iquest {

/// v hex digits, zero-padded, uppercase.
std::string code_symbols(std::uint64_t value, int digits);

/// Keyed device digest: the last v hex digits of HMAC-SHA256(key, id).
/// The engine records every assignment; a digest already taken by another
/// device, or equal to 0, moves to the next free value, so assigned digests
/// stay unique and non-zero.
class DeviceDigester {
 public:
  DeviceDigester(Bytes key, int digits);

  std::uint64_t raw_digest(const DeviceId& device) const;

  /// Returns the device's digest, assigning one on first sight.
  std::uint64_t assign(const DeviceId& device);

  /// The assigned digest, or for an unseen device the value it would be
  /// assigned, without recording it.
  std::uint64_t query_value(const DeviceId& device) const;

  std::optional<DeviceId> reverse(std::uint64_t value) const;

  const Bytes& key() const noexcept { return key_; }
  int digits() const noexcept { return digits_; }
  const std::map<DeviceId, std::uint64_t>& assignments() const noexcept { return forward_; }
  void restore(const std::map<DeviceId, std::uint64_t>& assignments);

 private:
  std::uint64_t probe(std::uint64_t start) const;

  Bytes key_;
  int digits_;
  std::uint64_t space_;
  std::map<DeviceId, std::uint64_t> forward_;
  std::unordered_map<std::uint64_t, DeviceId> reverse_;
};

/// Engine-private bijection between locations and v-digit codes 1..16^v-1.
/// Open registries assign codes on first sight; frozen ones reject unknown
/// locations.
class LocationRegistry {
 public:
  explicit LocationRegistry(int digits);

  /// Throws RegistryError for an unknown location once frozen, or when the
  /// code space is exhausted.
  std::uint64_t code(const LocationId& location);
  std::optional<std::uint64_t> find(const LocationId& location) const;
  /// Throws RegistryError for an unassigned code.
  const LocationId& location(std::uint64_t code) const;

  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }
  int digits() const noexcept { return digits_; }
  std::size_t size() const noexcept { return forward_.size(); }
  const std::map<LocationId, std::uint64_t>& entries() const noexcept { return forward_; }
  void restore(const std::map<LocationId, std::uint64_t>& entries, bool frozen);

 private:
  int digits_;
  bool frozen_ = false;
  std::map<LocationId, std::uint64_t> forward_;
  std::map<std::uint64_t, LocationId> reverse_;
};

}  // namespace quest::iquest
