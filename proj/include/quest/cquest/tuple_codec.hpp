#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quest/bytes.hpp"
#include "quest/model.hpp"

namespace quest::cquest {

// Canonical plaintext layout fed to the attribute ciphers: a sequence of
// (tag: u8, length: u16, payload) fields. Integers and nonces are fixed
// 8-byte LE payloads. A padding tag ends the tuple; the remaining bytes are
// zero fill.
enum class FieldTag : std::uint8_t {
  padding = 0,
  text = 1,
  integer = 2,
  nonce = 3,
  location_list = 4,
  fake = 5,  // reserved marker for A_CL rows that carry no location list
  bytes = 6,
};

struct TupleField {
  FieldTag tag = FieldTag::padding;
  std::string text;
  std::int64_t integer = 0;
  std::uint64_t nonce = 0;
  std::vector<std::string> list;
  Bytes bytes;
};

class TupleWriter {
 public:
  TupleWriter& text(std::string_view s);
  TupleWriter& integer(std::int64_t v);
  TupleWriter& nonce(std::uint64_t v);
  TupleWriter& fake();
  TupleWriter& location_list(const std::vector<LocationId>& locations);
  TupleWriter& bytes(ByteView b);

  /// Finishes the tuple, zero-padding to `pad_to` bytes when non-zero.
  /// Throws EncodingError if the tuple is already longer than that.
  Bytes finish(std::size_t pad_to = 0);

 private:
  void header(FieldTag tag, std::size_t len);
  ByteWriter w_;
};

std::vector<TupleField> parse_tuple(ByteView plaintext);

// ---- plaintext forms of the five relation attributes ----

/// A_id: (d, 1, x) on a device's first row in the epoch, (d, r, x) after.
Bytes device_first_plaintext(const DeviceId& d, EpochId x);
Bytes device_repeat_plaintext(const DeviceId& d, std::uint64_t r, EpochId x);

struct DevicePlain {
  DeviceId device;
  bool first = false;
  EpochId epoch = 0;
};
DevicePlain decode_device(ByteView plaintext);

/// A_u: (1, y, x) for a device's first row at a location, (0, r) otherwise.
/// The server-expandable variant nests (1, x) under k2 and wraps
/// (gamma, y) under the server's key.
Bytes unique_plaintext(std::int64_t y, EpochId x);
Bytes repeat_plaintext(std::uint64_t r);
Bytes unique_inner_plaintext(EpochId x);
Bytes unique_outer_plaintext(ByteView gamma, std::int64_t y);

struct UniquenessPlain {
  bool unique = false;
  std::int64_t row = 0;        // y, when unique and direct
  EpochId epoch = 0;           // x, when unique and direct/inner
  Bytes gamma;                 // outer form only
};
UniquenessPlain decode_uniqueness(ByteView plaintext);

/// A_L: (l, c, x) with c the location's running counter in epoch x.
Bytes location_plaintext(const LocationId& l, std::uint64_t counter, EpochId x);

struct LocationPlain {
  LocationId location;
  std::uint64_t counter = 0;
  EpochId epoch = 0;
};
LocationPlain decode_location(ByteView plaintext);

/// A_CL: (r, l_1..l_k) on the device's first row, (Fake, r) elsewhere;
/// both padded to the same length.
Bytes combined_locations_plaintext(std::uint64_t r, const std::vector<LocationId>& locations,
                                   std::size_t pad_to);
Bytes fake_locations_plaintext(std::uint64_t r, std::size_t pad_to);

/// nullopt for Fake payloads.
std::optional<std::vector<LocationId>> decode_combined_locations(ByteView plaintext);

/// A_Delta: (x).
Bytes epoch_plaintext(EpochId x);
EpochId decode_epoch(ByteView plaintext);

}  // namespace quest::cquest
