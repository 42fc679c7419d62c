#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "quest/bytes.hpp"
#include "quest/cquest/encrypter.hpp"
#include "quest/model.hpp"
#include "quest/sss/searchable.hpp"
#include "quest/sss/shamir.hpp"

// Request/response framing between the engines and the simulated servers.
// Every message starts with an opcode byte; variable-size fields carry u32
// length or count prefixes (see ByteWriter).
namespace quest::server {

enum class Op : std::uint8_t {
  c_ingest = 1,
  c_select = 2,
  c_expand = 3,
  c_htab = 4,
  i_ingest = 10,
  i_program = 11,
};

Op peek_op(ByteView message);

// ---- cQuest ----

enum class CColumn : std::uint8_t { a_id = 0, a_u = 1, a_l = 2, a_cl = 3, a_delta = 4 };

std::string_view column_name(CColumn c);
bool is_searchable(CColumn c);

struct CIngestRequest {
  EpochId epoch_id = 0;
  std::vector<cquest::EncryptedRow> rows;
  Bytes htab_counts;
  Bytes htab_members;
};

struct SelectRequest {
  CColumn column = CColumn::a_id;
  std::vector<Bytes> tokens;
  EpochRange range;
  std::vector<CColumn> project;
};

/// Server-side trapdoor expansion: one inner token per epoch.
struct ExpandRequest {
  std::vector<std::pair<EpochId, Bytes>> gammas;
  std::vector<CColumn> project;
};

struct CellRow {
  EpochId epoch_id = 0;
  std::uint32_t row_index = 0;
  std::vector<Bytes> cells;  // in the requested projection order

  friend bool operator==(const CellRow&, const CellRow&) = default;
};

struct SelectResponse {
  std::vector<CellRow> rows;
};

enum class HtabKind : std::uint8_t { counts = 0, members = 1 };

struct HtabRequest {
  HtabKind kind = HtabKind::counts;
  std::vector<EpochId> epochs;
};

struct HtabResponse {
  std::vector<std::pair<EpochId, Bytes>> blobs;
};

Bytes encode(const CIngestRequest& m);
Bytes encode(const SelectRequest& m);
Bytes encode(const ExpandRequest& m);
Bytes encode(const HtabRequest& m);
Bytes encode(const SelectResponse& m);
Bytes encode(const HtabResponse& m);

CIngestRequest decode_c_ingest(ByteView b);
SelectRequest decode_select(ByteView b);
ExpandRequest decode_expand(ByteView b);
HtabRequest decode_htab(ByteView b);
SelectResponse decode_select_response(ByteView b);
HtabResponse decode_htab_response(ByteView b);

// ---- iQuest ----

/// One epoch of one server's fragments, stored column-wise. SSS columns
/// hold rows * symbols * alphabet values; scalar columns hold one value per
/// row. All shares are of degree 1.
struct ShareColumns {
  EpochId epoch_id = 0;
  std::uint32_t server_index = 0;
  std::uint32_t rows = 0;
  std::uint32_t symbols = 0;
  std::uint32_t alphabet = sss::kHexAlphabet;
  std::vector<sss::FieldElement> smid;
  std::vector<sss::FieldElement> sid;
  std::vector<sss::FieldElement> su;
  std::vector<sss::FieldElement> sml;
  std::vector<sss::FieldElement> sl;

  std::size_t stride() const noexcept { return std::size_t{symbols} * alphabet; }

  friend bool operator==(const ShareColumns&, const ShareColumns&) = default;
};

enum class Program : std::uint8_t {
  location_trace = 0,   // match(smid, q0) * sl per row
  user_trace = 1,       // match(sml, qi) * sid per (query, row)
  social_distance = 2,  // su * sl per row
  aggregated_sd = 3,    // sum over an epoch's rows of match(sml, qi) * su
  offenders = 4,        // su * sid per row
};

std::string_view program_name(Program p);

struct ProgramRequest {
  Program program = Program::location_trace;
  EpochRange range;
  std::vector<sss::SssFragment> queries;
};

/// `epochs` lists the epochs the server holds inside the range, with their
/// row counts, in id order. Values are laid out query-major: for per-row
/// programs, queries x rows; for aggregated_sd, queries x epochs.
struct ProgramResponse {
  std::vector<std::pair<EpochId, std::uint32_t>> epochs;
  sss::ShareVector shares;
};

Bytes encode(const ShareColumns& m);
Bytes encode(const ProgramRequest& m);
Bytes encode(const ProgramResponse& m);

ShareColumns decode_i_ingest(ByteView b);
ProgramRequest decode_program(ByteView b);
ProgramResponse decode_program_response(ByteView b);

/// Plain acknowledgement: opcode echo plus a row count.
Bytes encode_ack(Op op, std::uint64_t rows);
std::uint64_t decode_ack(ByteView b);

}  // namespace quest::server
