#include "quest/model.hpp"

#include <cctype>
#include <cmath>

#include "quest/errors.hpp"

namespace quest {

namespace {

constexpr std::size_t kDeviceIdDigits = 12;

__extension__ typedef unsigned __int128 u128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

std::string canonicalize_device_id(std::string_view raw) {
  std::string out;
  out.reserve(kDeviceIdDigits);
  for (char c : raw) {
    if (c == ':' || c == '-' || c == '.') continue;
    if (!std::isxdigit(static_cast<unsigned char>(c))) {
      throw InvalidIdentifier("device id '" + std::string(raw) + "' contains non-hex character");
    }
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (out.empty() || out.size() > kDeviceIdDigits) {
    throw InvalidIdentifier("device id '" + std::string(raw) + "' must have 1-12 hex digits");
  }
  out.insert(0, kDeviceIdDigits - out.size(), '0');
  return out;
}

LocationId::LocationId(std::string_view raw) : value_(raw) {
  if (value_.empty()) throw InvalidIdentifier("empty location id");
  for (char c : value_) {
    if (c == ',' || c == '=' || std::isspace(static_cast<unsigned char>(c))) {
      throw InvalidIdentifier("location id '" + value_ + "' contains a reserved character");
    }
  }
}

double SystemConfig::occupancy_threshold(const LocationId& location) const {
  auto it = capacities.find(location);
  if (it == capacities.end()) {
    throw ConfigError("no capacity configured for location " + location.str());
  }
  return static_cast<double>(it->second) * distance_index;
}

void SystemConfig::validate() const {
  if (epoch_duration_s <= 0) throw ConfigError("epoch_duration must be positive");
  if (alphabet_size != 16) throw ConfigError("alphabet_size must be 16 (hex)");
  if (digest_digits < 1 || digest_digits >= 12) {
    throw ConfigError("digest_digits must satisfy 1 <= v < 12");
  }
  if (server_count < 2 * (digest_digits + 1) + 1) {
    throw ConfigError("server_count must be at least 2*(digest_digits+1)+1 = " +
                      std::to_string(2 * (digest_digits + 1) + 1));
  }
  if (server_count > 255) throw ConfigError("server_count must fit in one byte");
  if (!is_prime(field_prime)) throw ConfigError("field_prime is not prime");
  const std::uint64_t max_code = std::uint64_t{1} << (4 * digest_digits);
  if (field_prime <= max_code) {
    throw ConfigError("field_prime must exceed 16^digest_digits");
  }
  if (!(distance_index > 0.0 && distance_index <= 1.0)) {
    throw ConfigError("distance_index must lie in (0, 1]");
  }
  for (const auto& [loc, cap] : capacities) {
    if (cap <= 0) throw ConfigError("capacity for " + loc.str() + " must be positive");
  }
  if (top_k <= 0) throw ConfigError("top_k must be positive");
  if (acl_pad_bytes < 64) throw ConfigError("acl_pad_bytes must be at least 64");
}

TimestampMs stream_origin(TimestampMs first_timestamp, const SystemConfig& cfg) {
  if (first_timestamp < 0) throw RejectedEvent("negative timestamp");
  const auto dur = cfg.epoch_duration_ms();
  return first_timestamp - first_timestamp % dur;
}

EpochId assign_epoch(const ConnectivityEvent& event, const SystemConfig& cfg,
                     TimestampMs origin) {
  if (event.timestamp < origin) {
    throw RejectedEvent("event at " + std::to_string(event.timestamp) +
                        " precedes stream origin " + std::to_string(origin));
  }
  return (event.timestamp - origin) / cfg.epoch_duration_ms();
}

// Deterministic Miller-Rabin; these bases are exact for all 64-bit inputs.
bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace quest
