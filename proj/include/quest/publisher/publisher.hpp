#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "quest/model.hpp"

namespace quest::publisher {

struct AuditEntry {
  std::uint64_t sequence = 0;
  std::string device_hash;  // salted hash, never the raw id
  bool result = false;
  std::string status;  // "ok" or "list-unavailable"
};

/// Mock trusted publisher holding the infected-device list as a salted
/// SHA-256 set. Verification fails closed when no list is loaded.
class Publisher {
 public:
  /// A publisher with no list; every verify() returns false.
  Publisher() = default;

  static Publisher from_ids(const std::vector<DeviceId>& ids, std::string salt,
                            TimestampMs issued_at = 0);
  /// Reads infected.json. A missing or unreadable file yields an
  /// unavailable publisher rather than an exception.
  static Publisher load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  Publisher(const Publisher& other);
  Publisher& operator=(const Publisher& other);

  bool verify(const DeviceId& device);

  bool available() const noexcept { return available_; }
  /// Test seam for the fail-closed path.
  void set_available(bool available) noexcept { available_ = available; }

  std::string hash_id(const DeviceId& device) const;
  TimestampMs issued_at() const noexcept { return issued_at_; }
  std::size_t size() const noexcept { return hashes_.size(); }

  std::vector<AuditEntry> audit_log() const;
  void write_audit_jsonl(std::ostream& out) const;

 private:
  std::string salt_;
  TimestampMs issued_at_ = 0;
  std::unordered_set<std::string> hashes_;
  bool available_ = false;
  mutable std::mutex audit_mutex_;
  std::vector<AuditEntry> audit_;
};

/// Opt-in map from device to contact handle, plus a log of every
/// (simulated) delivery.
class NotificationRegistry {
 public:
  void add(const DeviceId& device, std::string contact);
  bool contains(const DeviceId& device) const { return contacts_.count(device) != 0; }
  std::size_t size() const noexcept { return contacts_.size(); }

  static NotificationRegistry load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Records a delivery for every id present in the registry and returns
  /// them in id order.
  std::vector<DeviceId> record_notifications(const std::set<DeviceId>& ids);

  const std::vector<std::pair<DeviceId, std::string>>& deliveries() const noexcept {
    return deliveries_;
  }

 private:
  std::map<DeviceId, std::string> contacts_;
  std::vector<std::pair<DeviceId, std::string>> deliveries_;
};

}  // namespace quest::publisher
