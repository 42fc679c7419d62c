#include "quest/iquest/digest.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "quest/errors.hpp"

namespace quest::iquest {

std::string code_symbols(std::uint64_t value, int digits) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out(static_cast<std::size_t>(digits), '0');
  for (int i = digits - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[value & 0xF];
    value >>= 4;
  }
  if (value != 0) throw EncodingError("code does not fit in " + std::to_string(digits) + " digits");
  return out;
}

DeviceDigester::DeviceDigester(Bytes key, int digits)
    : key_(std::move(key)), digits_(digits), space_(std::uint64_t{1} << (4 * digits)) {
  if (digits < 1 || digits > 12) throw ConfigError("digest digits must be in 1..12");
  if (key_.empty()) throw KeyDerivationError("digest key must not be empty");
}

std::uint64_t DeviceDigester::raw_digest(const DeviceId& device) const {
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  const auto& id = device.str();
  HMAC(EVP_sha256(), key_.data(), static_cast<int>(key_.size()),
       reinterpret_cast<const unsigned char*>(id.data()), id.size(), mac, &len);
  std::uint64_t tail = 0;
  for (unsigned i = len - 8; i < len; ++i) tail = (tail << 8) | mac[i];
  return tail & (space_ - 1);
}

std::uint64_t DeviceDigester::probe(std::uint64_t v) const {
  for (std::uint64_t step = 0; step < space_; ++step) {
    if (v != 0 && !reverse_.count(v)) return v;
    v = (v + 1) & (space_ - 1);
  }
  throw RegistryError("device digest space of " + std::to_string(space_) + " values exhausted");
}

std::uint64_t DeviceDigester::assign(const DeviceId& device) {
  auto it = forward_.find(device);
  if (it != forward_.end()) return it->second;
  const auto v = probe(raw_digest(device));
  forward_.emplace(device, v);
  reverse_.emplace(v, device);
  return v;
}

std::uint64_t DeviceDigester::query_value(const DeviceId& device) const {
  auto it = forward_.find(device);
  return it != forward_.end() ? it->second : probe(raw_digest(device));
}

std::optional<DeviceId> DeviceDigester::reverse(std::uint64_t value) const {
  auto it = reverse_.find(value);
  if (it == reverse_.end()) return std::nullopt;
  return it->second;
}

void DeviceDigester::restore(const std::map<DeviceId, std::uint64_t>& assignments) {
  forward_.clear();
  reverse_.clear();
  for (const auto& [d, v] : assignments) {
    if (v == 0 || v >= space_ || !reverse_.emplace(v, d).second) {
      throw RegistryError("invalid digest assignment for " + d.str());
    }
    forward_.emplace(d, v);
  }
}

LocationRegistry::LocationRegistry(int digits) : digits_(digits) {
  if (digits < 1 || digits > 12) throw ConfigError("location code digits must be in 1..12");
}

std::uint64_t LocationRegistry::code(const LocationId& location) {
  auto it = forward_.find(location);
  if (it != forward_.end()) return it->second;
  if (frozen_) throw RegistryError("location " + location.str() + " is not registered");
  const std::uint64_t next = forward_.size() + 1;
  if (next >= (std::uint64_t{1} << (4 * digits_))) {
    throw RegistryError("location code space exhausted");
  }
  forward_.emplace(location, next);
  reverse_.emplace(next, location);
  return next;
}

std::optional<std::uint64_t> LocationRegistry::find(const LocationId& location) const {
  auto it = forward_.find(location);
  if (it == forward_.end()) return std::nullopt;
  return it->second;
}

const LocationId& LocationRegistry::location(std::uint64_t code) const {
  auto it = reverse_.find(code);
  if (it == reverse_.end()) throw RegistryError("no location has code " + std::to_string(code));
  return it->second;
}

void LocationRegistry::restore(const std::map<LocationId, std::uint64_t>& entries, bool frozen) {
  forward_.clear();
  reverse_.clear();
  for (const auto& [l, c] : entries) {
    if (c == 0 || c >= (std::uint64_t{1} << (4 * digits_)) || !reverse_.emplace(c, l).second) {
      throw RegistryError("invalid code for location " + l.str());
    }
    forward_.emplace(l, c);
  }
  frozen_ = frozen;
}

}  // namespace quest::iquest
