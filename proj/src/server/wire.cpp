#include "quest/server/wire.hpp"

#include "quest/errors.hpp"

namespace quest::server {

namespace {

void expect_op(ByteReader& r, Op op) {
  const auto got = r.u8();
  if (got != static_cast<std::uint8_t>(op)) {
    throw FormatError("unexpected opcode " + std::to_string(got) + ", wanted " +
                      std::to_string(static_cast<int>(op)));
  }
}

void write_range(ByteWriter& w, const EpochRange& r) {
  w.i64(r.first);
  w.i64(r.last);
}

EpochRange read_range(ByteReader& r) {
  EpochRange out;
  out.first = r.i64();
  out.last = r.i64();
  return out;
}

void write_columns(ByteWriter& w, const std::vector<CColumn>& cols) {
  w.u32(static_cast<std::uint32_t>(cols.size()));
  for (auto c : cols) w.u8(static_cast<std::uint8_t>(c));
}

CColumn read_column(ByteReader& r) {
  const auto c = r.u8();
  if (c > static_cast<std::uint8_t>(CColumn::a_delta)) throw FormatError("unknown column");
  return static_cast<CColumn>(c);
}

std::vector<CColumn> read_columns(ByteReader& r) {
  std::vector<CColumn> out(r.u32());
  for (auto& c : out) c = read_column(r);
  return out;
}

void write_values(ByteWriter& w, const std::vector<sss::FieldElement>& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (auto x : v) w.u64(x.value);
}

std::vector<sss::FieldElement> read_values(ByteReader& r) {
  const auto n = r.u32();
  if (std::size_t{n} * 8 > r.remaining()) throw FormatError("value count exceeds message");
  std::vector<sss::FieldElement> out(n);
  for (auto& x : out) x.value = r.u64();
  return out;
}

}  // namespace

Op peek_op(ByteView message) {
  if (message.empty()) throw FormatError("empty message");
  return static_cast<Op>(message[0]);
}

std::string_view column_name(CColumn c) {
  switch (c) {
    case CColumn::a_id: return "A_id";
    case CColumn::a_u: return "A_u";
    case CColumn::a_l: return "A_L";
    case CColumn::a_cl: return "A_CL";
    case CColumn::a_delta: return "A_delta";
  }
  return "?";
}

bool is_searchable(CColumn c) {
  return c == CColumn::a_id || c == CColumn::a_u || c == CColumn::a_l;
}

Bytes encode(const CIngestRequest& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Op::c_ingest));
  w.i64(m.epoch_id);
  w.u32(static_cast<std::uint32_t>(m.rows.size()));
  for (const auto& row : m.rows) {
    w.blob(row.a_id);
    w.blob(row.a_u);
    w.blob(row.a_l);
    w.blob(row.a_cl);
    w.blob(row.a_delta);
  }
  w.blob(m.htab_counts);
  w.blob(m.htab_members);
  return std::move(w).take();
}

CIngestRequest decode_c_ingest(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::c_ingest);
  CIngestRequest m;
  m.epoch_id = r.i64();
  const auto n = r.u32();
  m.rows.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    cquest::EncryptedRow row;
    row.a_id = r.blob();
    row.a_u = r.blob();
    row.a_l = r.blob();
    row.a_cl = r.blob();
    row.a_delta = r.blob();
    m.rows.push_back(std::move(row));
  }
  m.htab_counts = r.blob();
  m.htab_members = r.blob();
  r.expect_done();
  return m;
}

Bytes encode(const SelectRequest& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Op::c_select));
  w.u8(static_cast<std::uint8_t>(m.column));
  w.u32(static_cast<std::uint32_t>(m.tokens.size()));
  for (const auto& t : m.tokens) w.blob(t);
  write_range(w, m.range);
  write_columns(w, m.project);
  return std::move(w).take();
}

SelectRequest decode_select(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::c_select);
  SelectRequest m;
  m.column = read_column(r);
  const auto n = r.u32();
  m.tokens.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) m.tokens.push_back(r.blob());
  m.range = read_range(r);
  m.project = read_columns(r);
  r.expect_done();
  return m;
}

Bytes encode(const ExpandRequest& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Op::c_expand));
  w.u32(static_cast<std::uint32_t>(m.gammas.size()));
  for (const auto& [x, g] : m.gammas) {
    w.i64(x);
    w.blob(g);
  }
  write_columns(w, m.project);
  return std::move(w).take();
}

ExpandRequest decode_expand(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::c_expand);
  ExpandRequest m;
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto x = r.i64();
    m.gammas.emplace_back(x, r.blob());
  }
  m.project = read_columns(r);
  r.expect_done();
  return m;
}

Bytes encode(const HtabRequest& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Op::c_htab));
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u32(static_cast<std::uint32_t>(m.epochs.size()));
  for (auto x : m.epochs) w.i64(x);
  return std::move(w).take();
}

HtabRequest decode_htab(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::c_htab);
  HtabRequest m;
  const auto kind = r.u8();
  if (kind > 1) throw FormatError("unknown hash-table kind");
  m.kind = static_cast<HtabKind>(kind);
  m.epochs.resize(r.u32());
  for (auto& x : m.epochs) x = r.i64();
  r.expect_done();
  return m;
}

Bytes encode(const SelectResponse& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Op::c_select));
  w.u32(static_cast<std::uint32_t>(m.rows.size()));
  for (const auto& row : m.rows) {
    w.i64(row.epoch_id);
    w.u32(row.row_index);
    w.u32(static_cast<std::uint32_t>(row.cells.size()));
    for (const auto& c : row.cells) w.blob(c);
  }
  return std::move(w).take();
}

SelectResponse decode_select_response(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::c_select);
  SelectResponse m;
  const auto n = r.u32();
  m.rows.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    CellRow row;
    row.epoch_id = r.i64();
    row.row_index = r.u32();
    const auto k = r.u32();
    for (std::uint32_t j = 0; j < k; ++j) row.cells.push_back(r.blob());
    m.rows.push_back(std::move(row));
  }
  r.expect_done();
  return m;
}

Bytes encode(const HtabResponse& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Op::c_htab));
  w.u32(static_cast<std::uint32_t>(m.blobs.size()));
  for (const auto& [x, blob] : m.blobs) {
    w.i64(x);
    w.blob(blob);
  }
  return std::move(w).take();
}

HtabResponse decode_htab_response(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::c_htab);
  HtabResponse m;
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto x = r.i64();
    m.blobs.emplace_back(x, r.blob());
  }
  r.expect_done();
  return m;
}

std::string_view program_name(Program p) {
  switch (p) {
    case Program::location_trace: return "location_trace";
    case Program::user_trace: return "user_trace";
    case Program::social_distance: return "social_distance";
    case Program::aggregated_sd: return "aggregated_sd";
    case Program::offenders: return "offenders";
  }
  return "?";
}

Bytes encode(const ShareColumns& m) {
  ByteWriter w(64 + 8 * (m.smid.size() + m.sml.size() + 3 * std::size_t{m.rows}));
  w.u8(static_cast<std::uint8_t>(Op::i_ingest));
  w.i64(m.epoch_id);
  w.u32(m.server_index);
  w.u32(m.rows);
  w.u32(m.symbols);
  w.u32(m.alphabet);
  write_values(w, m.smid);
  write_values(w, m.sid);
  write_values(w, m.su);
  write_values(w, m.sml);
  write_values(w, m.sl);
  return std::move(w).take();
}

ShareColumns decode_i_ingest(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::i_ingest);
  ShareColumns m;
  m.epoch_id = r.i64();
  m.server_index = r.u32();
  m.rows = r.u32();
  m.symbols = r.u32();
  m.alphabet = r.u32();
  m.smid = read_values(r);
  m.sid = read_values(r);
  m.su = read_values(r);
  m.sml = read_values(r);
  m.sl = read_values(r);
  r.expect_done();
  const auto cells = std::size_t{m.rows} * m.stride();
  if (m.smid.size() != cells || m.sml.size() != cells || m.sid.size() != m.rows ||
      m.su.size() != m.rows || m.sl.size() != m.rows) {
    throw ShapeError("share columns disagree with the declared row count");
  }
  return m;
}

Bytes encode(const ProgramRequest& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Op::i_program));
  w.u8(static_cast<std::uint8_t>(m.program));
  write_range(w, m.range);
  w.u32(static_cast<std::uint32_t>(m.queries.size()));
  for (const auto& q : m.queries) sss::write_fragment(w, q);
  return std::move(w).take();
}

ProgramRequest decode_program(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::i_program);
  ProgramRequest m;
  const auto p = r.u8();
  if (p > static_cast<std::uint8_t>(Program::offenders)) throw FormatError("unknown program");
  m.program = static_cast<Program>(p);
  m.range = read_range(r);
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) m.queries.push_back(sss::read_fragment(r));
  r.expect_done();
  return m;
}

Bytes encode(const ProgramResponse& m) {
  ByteWriter w(32 + 12 * m.epochs.size() + 8 * m.shares.values.size());
  w.u8(static_cast<std::uint8_t>(Op::i_program));
  w.u32(static_cast<std::uint32_t>(m.epochs.size()));
  for (const auto& [x, rows] : m.epochs) {
    w.i64(x);
    w.u32(rows);
  }
  sss::write_share_vector(w, m.shares);
  return std::move(w).take();
}

ProgramResponse decode_program_response(ByteView b) {
  ByteReader r(b);
  expect_op(r, Op::i_program);
  ProgramResponse m;
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto x = r.i64();
    m.epochs.emplace_back(x, r.u32());
  }
  m.shares = sss::read_share_vector(r);
  r.expect_done();
  return m;
}

Bytes encode_ack(Op op, std::uint64_t rows) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(op));
  w.u64(rows);
  return std::move(w).take();
}

std::uint64_t decode_ack(ByteView b) {
  ByteReader r(b);
  r.u8();
  const auto rows = r.u64();
  r.expect_done();
  return rows;
}

}  // namespace quest::server
