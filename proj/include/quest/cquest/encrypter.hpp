#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "quest/bytes.hpp"
#include "quest/cquest/cipher.hpp"
#include "quest/model.hpp"
#include "quest/sss/rng.hpp"

namespace quest::cquest {

struct EncryptedRow {
  Bytes a_id;
  Bytes a_u;
  Bytes a_l;
  Bytes a_cl;
  Bytes a_delta;

  friend bool operator==(const EncryptedRow&, const EncryptedRow&) = default;
};

/// How unique rows store A_u. `direct` is E_k2(1, y, x). `expandable` is
/// E_k(gamma_x, y) with gamma_x = E_k2(1, x) and k an outer key the server
/// also holds, which lets the server derive every unique-row token of an
/// epoch from gamma_x alone.
enum class UniquenessForm : std::uint8_t { direct = 0, expandable = 1 };

/// The ciphers for k1..k5 plus the location-table key and the optional
/// server-shared outer key.
class CipherSuite {
 public:
  CipherSuite(ByteView s_q, ByteView k_pko, std::optional<AttributeKey> outer = std::nullopt);

  const DeterministicCipher& id() const noexcept { return ciphers_[0]; }
  const DeterministicCipher& uniqueness() const noexcept { return ciphers_[1]; }
  const DeterministicCipher& location() const noexcept { return ciphers_[2]; }
  const DeterministicCipher& combined_locations() const noexcept { return ciphers_[3]; }
  const DeterministicCipher& epoch() const noexcept { return ciphers_[4]; }
  const DeterministicCipher& location_table() const noexcept { return ciphers_[5]; }

  bool has_outer() const noexcept { return outer_.has_value(); }
  /// Throws CapabilityError without an outer key.
  const DeterministicCipher& outer() const;
  const std::optional<AttributeKey>& outer_key() const noexcept { return outer_key_; }

 private:
  std::vector<DeterministicCipher> ciphers_;
  std::optional<AttributeKey> outer_key_;
  std::optional<DeterministicCipher> outer_;
};

/// What survives an epoch's sealing on the encrypter host. The per-epoch
/// hash tables themselves are dropped; `table_bytes` records how large they
/// were at the moment of deletion.
struct EpochMetadata {
  EpochId epoch_id = 0;
  std::uint64_t row_count = 0;
  std::uint64_t device_count = 0;
  std::uint64_t max_counter = 0;
  std::map<LocationId, std::uint64_t> location_counters;
  std::uint64_t table_bytes = 0;
};

struct EncryptedEpoch {
  EpochId epoch_id = 0;
  std::vector<EncryptedRow> rows;
  // Outsourced location tables under the location-table key:
  // counts holds (location, unique devices, counter) triples, members the
  // distinct devices per location.
  Bytes htab_counts;
  Bytes htab_members;
  EpochMetadata metadata;
};

struct EncryptOptions {
  UniquenessForm uniqueness = UniquenessForm::direct;
  std::size_t acl_pad_bytes = 512;
};

/// Encrypts one sealed epoch. Throws SealingError when an event's timestamp
/// falls outside [begin, end).
EncryptedEpoch encrypt_epoch(const Epoch& epoch, const CipherSuite& suite,
                             const EncryptOptions& options, sss::RandomSource& rng);

/// Tokens the client and server agree on for the unique rows of an epoch.
Bytes unique_token(const CipherSuite& suite, UniquenessForm form, std::int64_t y, EpochId x);
Bytes unique_gamma(const CipherSuite& suite, EpochId x);
Bytes expand_gamma(const DeterministicCipher& outer, ByteView gamma, std::int64_t y);

struct LocationCount {
  LocationId location;
  std::uint64_t unique_devices = 0;
  std::uint64_t counter = 0;
};

struct DecodedCounts {
  EpochId epoch_id = 0;
  std::vector<LocationCount> locations;
};
DecodedCounts decode_htab_counts(const CipherSuite& suite, ByteView blob);

struct DecodedMembers {
  EpochId epoch_id = 0;
  std::map<LocationId, std::vector<DeviceId>> members;
};
DecodedMembers decode_htab_members(const CipherSuite& suite, ByteView blob);

}  // namespace quest::cquest
