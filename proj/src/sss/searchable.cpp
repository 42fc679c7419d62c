#include "quest/sss/searchable.hpp"

#include "quest/errors.hpp"

namespace quest::sss {

std::vector<std::uint8_t> encode_unary(std::uint32_t symbol, std::uint32_t alphabet_size) {
  if (alphabet_size == 0 || symbol >= alphabet_size) {
    throw EncodingError("symbol " + std::to_string(symbol) + " outside alphabet of size " +
                        std::to_string(alphabet_size));
  }
  std::vector<std::uint8_t> v(alphabet_size, 0);
  v[symbol] = 1;
  return v;
}

std::vector<std::uint32_t> hex_symbols(std::string_view hex) {
  std::vector<std::uint32_t> out;
  out.reserve(hex.size());
  for (char c : hex) {
    if (c >= '0' && c <= '9') out.push_back(static_cast<std::uint32_t>(c - '0'));
    else if (c >= 'A' && c <= 'F') out.push_back(static_cast<std::uint32_t>(c - 'A' + 10));
    else if (c >= 'a' && c <= 'f') out.push_back(static_cast<std::uint32_t>(c - 'a' + 10));
    else throw EncodingError(std::string("not a hex symbol: ") + c);
  }
  return out;
}

std::vector<SssFragment> make_sss(const PrimeField& field, std::span<const std::uint32_t> symbols,
                                  std::uint32_t n, RandomSource& rng, std::uint32_t alphabet_size) {
  if (n < 2 || n > 255) throw ThresholdError("searchable shares need 2..255 servers");
  const auto l = static_cast<std::uint32_t>(symbols.size());
  std::vector<SssFragment> out(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    out[i].server_index = i + 1;
    out[i].symbol_count = l;
    out[i].alphabet_size = alphabet_size;
    out[i].degree = 1;
    out[i].values.resize(std::size_t{l} * alphabet_size);
  }
  std::size_t slot = 0;
  for (std::uint32_t p = 0; p < l; ++p) {
    const auto unary = encode_unary(symbols[p], alphabet_size);
    for (std::uint32_t s = 0; s < alphabet_size; ++s, ++slot) {
      // bit + c*x evaluated at x = 1..n by repeated addition of c.
      const FieldElement c = field.random(rng);
      FieldElement v = field.add({unary[s]}, c);
      for (std::uint32_t i = 0; i < n; ++i) {
        out[i].values[slot] = v;
        v = field.add(v, c);
      }
    }
  }
  return out;
}

FieldElement string_match_values(const PrimeField& field, std::span<const FieldElement> data,
                                 std::span<const FieldElement> query, std::uint32_t symbol_count,
                                 std::uint32_t alphabet_size) {
  FieldElement acc{1};
  for (std::uint32_t p = 0; p < symbol_count; ++p) {
    const auto off = std::size_t{p} * alphabet_size;
    acc = field.mul(acc, field.dot(data.subspan(off, alphabet_size), query.subspan(off, alphabet_size)));
  }
  return acc;
}

Share string_match(const PrimeField& field, const SssFragment& data, const SssFragment& query) {
  if (data.server_index != query.server_index) {
    throw CrossServerError("string match across servers " + std::to_string(data.server_index) +
                           " and " + std::to_string(query.server_index));
  }
  if (data.symbol_count != query.symbol_count || data.alphabet_size != query.alphabet_size ||
      data.values.size() != query.values.size()) {
    throw ShapeError("string match operands differ in length or alphabet");
  }
  const auto v = string_match_values(field, data.values, query.values, data.symbol_count,
                                     data.alphabet_size);
  return {data.server_index, v, data.symbol_count * (data.degree + query.degree)};
}

void write_fragment(ByteWriter& w, const SssFragment& f) {
  if (f.server_index > 255 || f.degree > 255 || f.symbol_count > 255 || f.alphabet_size > 255) {
    throw FormatError("fragment header field does not fit in one byte");
  }
  w.u8(static_cast<std::uint8_t>(f.server_index));
  w.u8(static_cast<std::uint8_t>(f.degree));
  w.u8(static_cast<std::uint8_t>(f.symbol_count));
  w.u8(static_cast<std::uint8_t>(f.alphabet_size));
  for (auto v : f.values) w.u64(v.value);
}

SssFragment read_fragment(ByteReader& r) {
  SssFragment f;
  f.server_index = r.u8();
  f.degree = r.u8();
  f.symbol_count = r.u8();
  f.alphabet_size = r.u8();
  f.values.resize(std::size_t{f.symbol_count} * f.alphabet_size);
  for (auto& v : f.values) v.value = r.u64();
  return f;
}

}  // namespace quest::sss
