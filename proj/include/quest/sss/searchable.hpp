#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "quest/bytes.hpp"
#include "quest/sss/field.hpp"
#include "quest/sss/rng.hpp"
#include "quest/sss/shamir.hpp"

namespace quest::sss {

inline constexpr std::uint32_t kHexAlphabet = 16;

/// One-hot vector for `symbol`. Throws EncodingError when out of range.
std::vector<std::uint8_t> encode_unary(std::uint32_t symbol, std::uint32_t alphabet_size = kHexAlphabet);

/// Hex digit string -> alphabet indexes ("0A3" -> {0, 10, 3}).
std::vector<std::uint32_t> hex_symbols(std::string_view hex);

/// One server's fragment of a searchable secret-shared string: for every
/// position, the shares of that position's unary vector. Values are laid out
/// position-major, then by symbol index.
struct SssFragment {
  std::uint32_t server_index = 0;
  std::uint32_t symbol_count = 0;
  std::uint32_t alphabet_size = kHexAlphabet;
  std::uint32_t degree = 1;
  std::vector<FieldElement> values;

  std::span<const FieldElement> position(std::uint32_t p) const {
    return std::span<const FieldElement>(values).subspan(std::size_t{p} * alphabet_size,
                                                         alphabet_size);
  }

  friend bool operator==(const SssFragment&, const SssFragment&) = default;
};

/// Searchable shares of `symbols`, one fragment per server (index i+1 at
/// slot i). Every bit gets its own fresh degree-1 polynomial; coefficients
/// are drawn in layout order.
std::vector<SssFragment> make_sss(const PrimeField& field, std::span<const std::uint32_t> symbols,
                                  std::uint32_t n, RandomSource& rng,
                                  std::uint32_t alphabet_size = kHexAlphabet);

/// Oblivious equality on one server: per position the dot product of the
/// two unary share vectors, multiplied across positions. The result is a
/// share (of degree 2l for l positions) of 1 when the strings are equal and
/// of 0 otherwise.
Share string_match(const PrimeField& field, const SssFragment& data, const SssFragment& query);

/// The same computation on raw value spans, for server stores that keep
/// fragments in flat columns. Shapes must already agree.
FieldElement string_match_values(const PrimeField& field, std::span<const FieldElement> data,
                                 std::span<const FieldElement> query, std::uint32_t symbol_count,
                                 std::uint32_t alphabet_size);

// Wire form: (server_index: u8, degree: u8, symbol_count: u8,
// alphabet_size: u8) then symbol_count * alphabet_size u64 LE values.
void write_fragment(ByteWriter& w, const SssFragment& f);
SssFragment read_fragment(ByteReader& r);

}  // namespace quest::sss
