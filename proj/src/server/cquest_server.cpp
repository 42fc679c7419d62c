#include "quest/server/cquest_server.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "quest/cquest/encrypter.hpp"
#include "quest/errors.hpp"

namespace quest::server {

namespace {

constexpr std::string_view kMagic = "QCS1";

const Bytes& cell_of(const cquest::EncryptedRow& row, CColumn c) {
  switch (c) {
    case CColumn::a_id: return row.a_id;
    case CColumn::a_u: return row.a_u;
    case CColumn::a_l: return row.a_l;
    case CColumn::a_cl: return row.a_cl;
    case CColumn::a_delta: return row.a_delta;
  }
  throw QueryError("unknown column");
}

}  // namespace

void CquestServer::set_outer_key(cquest::AttributeKey key) {
  outer_.emplace(key);
  outer_key_ = std::move(key);
}

std::uint64_t CquestServer::ingest(CIngestRequest epoch) {
  if (epochs_.count(epoch.epoch_id)) {
    throw IngestionError("epoch " + std::to_string(epoch.epoch_id) + " is already sealed");
  }
  const auto x = epoch.epoch_id;
  auto& stored = epochs_[x];
  for (std::uint32_t i = 0; i < epoch.rows.size(); ++i) {
    const auto& row = epoch.rows[i];
    for (auto c : {CColumn::a_id, CColumn::a_u, CColumn::a_l}) {
      indexes_[static_cast<std::size_t>(c)][key_of(cell_of(row, c))].push_back({x, i});
    }
    stored_bytes_ += row.a_id.size() + row.a_u.size() + row.a_l.size() + row.a_cl.size() +
                     row.a_delta.size();
  }
  stored_bytes_ += epoch.htab_counts.size() + epoch.htab_members.size();
  stored.rows = std::move(epoch.rows);
  stored.htab_counts = std::move(epoch.htab_counts);
  stored.htab_members = std::move(epoch.htab_members);
  return stored.rows.size();
}

SelectResponse CquestServer::collect(std::vector<RowRef> hits, CColumn searched,
                                     const std::vector<CColumn>& project,
                                     std::vector<RowTouch>& touches) const {
  std::sort(hits.begin(), hits.end(), [](const RowRef& a, const RowRef& b) {
    return a.epoch != b.epoch ? a.epoch < b.epoch : a.row < b.row;
  });
  hits.erase(std::unique(hits.begin(), hits.end(),
                         [](const RowRef& a, const RowRef& b) {
                           return a.epoch == b.epoch && a.row == b.row;
                         }),
             hits.end());
  SelectResponse out;
  out.rows.reserve(hits.size());
  for (const auto& h : hits) {
    const auto& row = epochs_.at(h.epoch).rows[h.row];
    touches.push_back({h.epoch, h.row, std::string(column_name(searched))});
    CellRow cr{h.epoch, h.row, {}};
    for (auto c : project) {
      touches.push_back({h.epoch, h.row, std::string(column_name(c))});
      cr.cells.push_back(cell_of(row, c));
    }
    out.rows.push_back(std::move(cr));
  }
  return out;
}

SelectResponse CquestServer::select_equal(const SelectRequest& request,
                                          std::vector<RowTouch>& touches) const {
  if (!is_searchable(request.column)) {
    throw QueryError(std::string(column_name(request.column)) + " is not searchable");
  }
  const auto& index = indexes_[static_cast<std::size_t>(request.column)];
  std::vector<RowRef> hits;
  for (const auto& token : request.tokens) {
    auto it = index.find(key_of(token));
    if (it == index.end()) continue;
    for (const auto& ref : it->second) {
      if (request.range.contains(ref.epoch)) hits.push_back(ref);
    }
  }
  return collect(std::move(hits), request.column, request.project, touches);
}

SelectResponse CquestServer::expand_and_select(const ExpandRequest& request,
                                               std::vector<RowTouch>& touches) const {
  if (!outer_) throw CapabilityError("server holds no outer key; cannot expand trapdoors");
  const auto& index = indexes_[static_cast<std::size_t>(CColumn::a_u)];
  std::vector<RowRef> hits;
  for (const auto& [x, gamma] : request.gammas) {
    auto ep = epochs_.find(x);
    if (ep == epochs_.end()) continue;
    const auto n = static_cast<std::int64_t>(ep->second.rows.size());
    for (std::int64_t y = 1; y <= n; ++y) {
      auto it = index.find(key_of(cquest::expand_gamma(*outer_, gamma, y)));
      if (it == index.end()) continue;
      for (const auto& ref : it->second) {
        if (ref.epoch == x) hits.push_back(ref);
      }
    }
  }
  return collect(std::move(hits), CColumn::a_u, request.project, touches);
}

HtabResponse CquestServer::fetch_htab(const HtabRequest& request,
                                      std::vector<RowTouch>& touches) const {
  HtabResponse out;
  const char* column = request.kind == HtabKind::counts ? "HTab_L" : "HTab_members";
  for (auto x : request.epochs) {
    auto it = epochs_.find(x);
    if (it == epochs_.end()) continue;
    touches.push_back({x, 0, column});
    out.blobs.emplace_back(x, request.kind == HtabKind::counts ? it->second.htab_counts
                                                                : it->second.htab_members);
  }
  return out;
}

Bytes CquestServer::handle(ByteView request, std::vector<RowTouch>& touches) {
  switch (peek_op(request)) {
    case Op::c_ingest: {
      const auto n = ingest(decode_c_ingest(request));
      return encode_ack(Op::c_ingest, n);
    }
    case Op::c_select:
      return encode(select_equal(decode_select(request), touches));
    case Op::c_expand:
      return encode(expand_and_select(decode_expand(request), touches));
    case Op::c_htab:
      return encode(fetch_htab(decode_htab(request), touches));
    default:
      throw QueryError("operation not supported by a cQuest server");
  }
}

const cquest::EncryptedRow& CquestServer::row(EpochId epoch, std::uint32_t index) const {
  auto it = epochs_.find(epoch);
  if (it == epochs_.end() || index >= it->second.rows.size()) {
    throw QueryError("no row " + std::to_string(index) + " in epoch " + std::to_string(epoch));
  }
  return it->second.rows[index];
}

std::uint32_t CquestServer::row_count(EpochId epoch) const {
  auto it = epochs_.find(epoch);
  return it == epochs_.end() ? 0 : static_cast<std::uint32_t>(it->second.rows.size());
}

std::vector<EpochId> CquestServer::epochs() const {
  std::vector<EpochId> out;
  for (const auto& [x, _] : epochs_) out.push_back(x);
  return out;
}

void CquestServer::save(const std::filesystem::path& path) const {
  ByteWriter w;
  w.raw(as_bytes(kMagic));
  w.u32(static_cast<std::uint32_t>(index_));
  w.u8(outer_key_ ? 1 : 0);
  if (outer_key_) w.blob(outer_key_->key_bytes);
  w.u32(static_cast<std::uint32_t>(epochs_.size()));
  for (const auto& [x, ep] : epochs_) {
    w.blob(encode(CIngestRequest{x, ep.rows, ep.htab_counts, ep.htab_members}));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write store " + path.string());
  out.write(reinterpret_cast<const char*>(w.buffer().data()),
            static_cast<std::streamsize>(w.size()));
}

CquestServer CquestServer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read store " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ByteReader r(data);
  auto magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw FormatError(path.string() + " is not a cQuest store");
  }
  CquestServer s(static_cast<int>(r.u32()));
  if (r.u8()) s.set_outer_key(cquest::AttributeKey{r.blob()});
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) s.ingest(decode_c_ingest(r.blob()));
  r.expect_done();
  return s;
}

}  // namespace quest::server
