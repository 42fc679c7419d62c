#pragma once

#include <array>
#include <cstdint>

#include "quest/bytes.hpp"

namespace quest::cquest {

/// Attribute ids used for key derivation. 1..5 are the five relation
/// columns; 6 keys the outsourced per-epoch location tables.
enum class Attribute : std::uint8_t {
  id = 1,
  uniqueness = 2,
  location = 3,
  combined_locations = 4,
  epoch = 5,
  location_table = 6,
};

/// (s_q XOR k_pko) || attribute_id.
struct AttributeKey {
  Bytes key_bytes;

  friend bool operator==(const AttributeKey&, const AttributeKey&) = default;
};

AttributeKey derive_attribute_key(ByteView s_q, ByteView k_pko, std::uint8_t attribute_id);

/// Keys k1..k5 for the five relation attributes. Throws KeyDerivationError
/// when the inputs are empty or differ in length.
std::array<AttributeKey, 5> derive_keys(ByteView s_q, ByteView k_pko);

/// Deterministic authenticated encryption (SIV construction): the IV is a
/// truncated HMAC-SHA256 of the plaintext and the body is AES-256-CTR under
/// that IV. Equal plaintexts give byte-equal ciphertexts, which is what
/// makes equality search on ciphertexts possible.
class DeterministicCipher {
 public:
  static constexpr std::size_t kIvBytes = 16;

  explicit DeterministicCipher(const AttributeKey& key);

  Bytes encrypt(ByteView plaintext) const;
  /// Throws DecryptionError when the ciphertext was not produced under this
  /// key.
  Bytes decrypt(ByteView ciphertext) const;

 private:
  std::array<std::uint8_t, 32> enc_key_{};
  std::array<std::uint8_t, 32> mac_key_{};
};

}  // namespace quest::cquest
