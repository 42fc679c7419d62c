#include "quest/cquest/tuple_codec.hpp"

#include "quest/errors.hpp"

namespace quest::cquest {

void TupleWriter::header(FieldTag tag, std::size_t len) {
  if (len > 0xFFFF) throw EncodingError("tuple field too long");
  w_.u8(static_cast<std::uint8_t>(tag));
  w_.u16(static_cast<std::uint16_t>(len));
}

TupleWriter& TupleWriter::text(std::string_view s) {
  header(FieldTag::text, s.size());
  w_.raw(as_bytes(s));
  return *this;
}

TupleWriter& TupleWriter::integer(std::int64_t v) {
  header(FieldTag::integer, 8);
  w_.i64(v);
  return *this;
}

TupleWriter& TupleWriter::nonce(std::uint64_t v) {
  header(FieldTag::nonce, 8);
  w_.u64(v);
  return *this;
}

TupleWriter& TupleWriter::fake() {
  header(FieldTag::fake, 0);
  return *this;
}

TupleWriter& TupleWriter::location_list(const std::vector<LocationId>& locations) {
  ByteWriter body;
  body.u16(static_cast<std::uint16_t>(locations.size()));
  for (const auto& l : locations) {
    if (l.str().size() > 0xFF) throw EncodingError("location id too long");
    body.u8(static_cast<std::uint8_t>(l.str().size()));
    body.raw(as_bytes(l.str()));
  }
  header(FieldTag::location_list, body.size());
  w_.raw(body.buffer());
  return *this;
}

TupleWriter& TupleWriter::bytes(ByteView b) {
  header(FieldTag::bytes, b.size());
  w_.raw(b);
  return *this;
}

Bytes TupleWriter::finish(std::size_t pad_to) {
  if (pad_to != 0) {
    if (w_.size() > pad_to) {
      throw EncodingError("tuple of " + std::to_string(w_.size()) + " bytes exceeds pad width " +
                          std::to_string(pad_to));
    }
    w_.buffer().resize(pad_to, 0);
  }
  return std::move(w_).take();
}

std::vector<TupleField> parse_tuple(ByteView plaintext) {
  std::vector<TupleField> out;
  ByteReader r(plaintext);
  while (!r.done()) {
    TupleField f;
    f.tag = static_cast<FieldTag>(r.u8());
    if (f.tag == FieldTag::padding) break;
    const auto len = r.u16();
    auto payload = r.raw(len);
    ByteReader p(payload);
    switch (f.tag) {
      case FieldTag::text:
        f.text.assign(payload.begin(), payload.end());
        break;
      case FieldTag::integer:
        f.integer = p.i64();
        p.expect_done();
        break;
      case FieldTag::nonce:
        f.nonce = p.u64();
        p.expect_done();
        break;
      case FieldTag::fake:
        break;
      case FieldTag::location_list: {
        const auto n = p.u16();
        for (std::uint16_t i = 0; i < n; ++i) {
          const auto sl = p.u8();
          auto s = p.raw(sl);
          f.list.emplace_back(s.begin(), s.end());
        }
        p.expect_done();
        break;
      }
      case FieldTag::bytes:
        f.bytes.assign(payload.begin(), payload.end());
        break;
      default:
        throw FormatError("unknown tuple field tag");
    }
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

void expect_shape(const std::vector<TupleField>& f, std::initializer_list<FieldTag> tags,
                  const char* what) {
  if (f.size() != tags.size()) throw FormatError(std::string("malformed ") + what + " plaintext");
  std::size_t i = 0;
  for (auto t : tags) {
    if (f[i++].tag != t) throw FormatError(std::string("malformed ") + what + " plaintext");
  }
}

}  // namespace

Bytes device_first_plaintext(const DeviceId& d, EpochId x) {
  return TupleWriter().text(d.str()).integer(1).integer(x).finish();
}

Bytes device_repeat_plaintext(const DeviceId& d, std::uint64_t r, EpochId x) {
  return TupleWriter().text(d.str()).nonce(r).integer(x).finish();
}

DevicePlain decode_device(ByteView plaintext) {
  auto f = parse_tuple(plaintext);
  if (f.size() != 3 || f[0].tag != FieldTag::text || f[2].tag != FieldTag::integer) {
    throw FormatError("malformed device plaintext");
  }
  DevicePlain out;
  out.device = DeviceId(f[0].text);
  out.first = f[1].tag == FieldTag::integer && f[1].integer == 1;
  out.epoch = f[2].integer;
  return out;
}

Bytes unique_plaintext(std::int64_t y, EpochId x) {
  return TupleWriter().integer(1).integer(y).integer(x).finish();
}

Bytes repeat_plaintext(std::uint64_t r) { return TupleWriter().integer(0).nonce(r).finish(); }

Bytes unique_inner_plaintext(EpochId x) { return TupleWriter().integer(1).integer(x).finish(); }

Bytes unique_outer_plaintext(ByteView gamma, std::int64_t y) {
  return TupleWriter().bytes(gamma).integer(y).finish();
}

UniquenessPlain decode_uniqueness(ByteView plaintext) {
  auto f = parse_tuple(plaintext);
  UniquenessPlain out;
  if (f.size() == 3 && f[0].tag == FieldTag::integer && f[0].integer == 1) {
    out.unique = true;
    out.row = f[1].integer;
    out.epoch = f[2].integer;
  } else if (f.size() == 2 && f[0].tag == FieldTag::integer && f[0].integer == 1) {
    out.unique = true;
    out.epoch = f[1].integer;
  } else if (f.size() == 2 && f[0].tag == FieldTag::bytes) {
    out.unique = true;
    out.gamma = f[0].bytes;
    out.row = f[1].integer;
  } else if (f.size() == 2 && f[0].tag == FieldTag::integer && f[0].integer == 0) {
    out.unique = false;
  } else {
    throw FormatError("malformed uniqueness plaintext");
  }
  return out;
}

Bytes location_plaintext(const LocationId& l, std::uint64_t counter, EpochId x) {
  return TupleWriter().text(l.str()).integer(static_cast<std::int64_t>(counter)).integer(x).finish();
}

LocationPlain decode_location(ByteView plaintext) {
  auto f = parse_tuple(plaintext);
  expect_shape(f, {FieldTag::text, FieldTag::integer, FieldTag::integer}, "location");
  return {LocationId(f[0].text), static_cast<std::uint64_t>(f[1].integer), f[2].integer};
}

Bytes combined_locations_plaintext(std::uint64_t r, const std::vector<LocationId>& locations,
                                   std::size_t pad_to) {
  return TupleWriter().nonce(r).location_list(locations).finish(pad_to);
}

Bytes fake_locations_plaintext(std::uint64_t r, std::size_t pad_to) {
  return TupleWriter().fake().nonce(r).finish(pad_to);
}

std::optional<std::vector<LocationId>> decode_combined_locations(ByteView plaintext) {
  auto f = parse_tuple(plaintext);
  if (!f.empty() && f[0].tag == FieldTag::fake) return std::nullopt;
  expect_shape(f, {FieldTag::nonce, FieldTag::location_list}, "combined-location");
  std::vector<LocationId> out;
  for (const auto& s : f[1].list) out.emplace_back(s);
  return out;
}

Bytes epoch_plaintext(EpochId x) { return TupleWriter().integer(x).finish(); }

EpochId decode_epoch(ByteView plaintext) {
  auto f = parse_tuple(plaintext);
  expect_shape(f, {FieldTag::integer}, "epoch");
  return f[0].integer;
}

}  // namespace quest::cquest
