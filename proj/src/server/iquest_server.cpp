#include "quest/server/iquest_server.hpp"

#include <fstream>
#include <iterator>
#include <random>

#include "quest/errors.hpp"

namespace quest::server {

namespace {

constexpr std::string_view kMagic = "QIS1";

struct ProgramShape {
  std::size_t min_queries;
  std::size_t max_queries;
  const char* left;
  const char* right;
};

ProgramShape shape_of(Program p) {
  switch (p) {
    case Program::location_trace: return {1, 1, "A_smid", "A_sL"};
    case Program::user_trace: return {0, SIZE_MAX, "A_smL", "A_sid"};
    case Program::social_distance: return {0, 0, "A_su", "A_sL"};
    case Program::aggregated_sd: return {0, SIZE_MAX, "A_smL", "A_su"};
    case Program::offenders: return {0, 0, "A_su", "A_sid"};
  }
  throw QueryError("unknown program");
}

}  // namespace

IquestServer::IquestServer(int index, std::uint64_t prime) : index_(index), field_(prime) {}

std::uint64_t IquestServer::ingest(ShareColumns epoch) {
  if (epoch.server_index != static_cast<std::uint32_t>(index_)) {
    throw CrossServerError("fragments for server " + std::to_string(epoch.server_index) +
                           " sent to server " + std::to_string(index_));
  }
  if (epochs_.count(epoch.epoch_id)) {
    throw IngestionError("epoch " + std::to_string(epoch.epoch_id) + " is already sealed");
  }
  const auto rows = epoch.rows;
  stored_bytes_ += 8 * (epoch.smid.size() + epoch.sml.size() + epoch.sid.size() +
                        epoch.su.size() + epoch.sl.size()) + 8;
  epochs_.emplace(epoch.epoch_id, std::move(epoch));
  return rows;
}

ProgramResponse IquestServer::evaluate(const ProgramRequest& request,
                                       std::vector<RowTouch>& touches) const {
  const auto shape = shape_of(request.program);
  if (request.queries.size() < shape.min_queries || request.queries.size() > shape.max_queries) {
    throw ShapeError(std::string(program_name(request.program)) + " takes " +
                     std::to_string(shape.min_queries) + ".." +
                     (shape.max_queries == SIZE_MAX ? std::string("n")
                                                    : std::to_string(shape.max_queries)) +
                     " query strings, got " + std::to_string(request.queries.size()));
  }
  for (const auto& q : request.queries) {
    if (q.server_index != static_cast<std::uint32_t>(index_)) {
      throw CrossServerError("query fragment for server " + std::to_string(q.server_index) +
                             " sent to server " + std::to_string(index_));
    }
    if (q.values.size() != std::size_t{q.symbol_count} * q.alphabet_size) {
      throw ShapeError("query fragment length disagrees with its header");
    }
  }

  std::vector<const ShareColumns*> selected;
  ProgramResponse out;
  if (!request.range.empty()) {
    for (auto it = epochs_.lower_bound(request.range.first);
         it != epochs_.end() && it->first <= request.range.last; ++it) {
      selected.push_back(&it->second);
      out.epochs.emplace_back(it->first, it->second.rows);
    }
  }
  for (const auto& q : request.queries) {
    for (const auto* ep : selected) {
      if (q.symbol_count != ep->symbols || q.alphabet_size != ep->alphabet) {
        throw ShapeError("query string shape differs from the stored strings");
      }
    }
  }

  out.shares.server_index = static_cast<std::uint32_t>(index_);
  const std::uint32_t q_degree = request.queries.empty() ? 1 : request.queries.front().degree;
  const std::uint32_t symbols =
      request.queries.empty() ? 0 : request.queries.front().symbol_count;
  switch (request.program) {
    case Program::social_distance:
    case Program::offenders:
      out.shares.degree = 2;
      break;
    default:
      out.shares.degree = symbols * (1 + q_degree) + 1;
  }

  for (const auto* ep : selected) {
    for (std::uint32_t j = 0; j < ep->rows; ++j) {
      touches.push_back({ep->epoch_id, j, shape.left});
      touches.push_back({ep->epoch_id, j, shape.right});
    }
  }

  auto& values = out.shares.values;
  const auto& f = field_;
  switch (request.program) {
    case Program::location_trace: {
      const auto& q = request.queries.front();
      for (const auto* ep : selected) {
        const auto stride = ep->stride();
        for (std::uint32_t j = 0; j < ep->rows; ++j) {
          std::span<const sss::FieldElement> row(ep->smid.data() + j * stride, stride);
          values.push_back(f.mul(
              sss::string_match_values(f, row, q.values, ep->symbols, ep->alphabet), ep->sl[j]));
        }
      }
      break;
    }
    case Program::user_trace: {
      for (const auto& q : request.queries) {
        for (const auto* ep : selected) {
          const auto stride = ep->stride();
          for (std::uint32_t j = 0; j < ep->rows; ++j) {
            std::span<const sss::FieldElement> row(ep->sml.data() + j * stride, stride);
            values.push_back(f.mul(
                sss::string_match_values(f, row, q.values, ep->symbols, ep->alphabet), ep->sid[j]));
          }
        }
      }
      break;
    }
    case Program::social_distance:
      for (const auto* ep : selected) {
        for (std::uint32_t j = 0; j < ep->rows; ++j) values.push_back(f.mul(ep->su[j], ep->sl[j]));
      }
      break;
    case Program::offenders:
      for (const auto* ep : selected) {
        for (std::uint32_t j = 0; j < ep->rows; ++j) values.push_back(f.mul(ep->su[j], ep->sid[j]));
      }
      break;
    case Program::aggregated_sd: {
      for (const auto& q : request.queries) {
        for (const auto* ep : selected) {
          const auto stride = ep->stride();
          sss::FieldElement acc{0};
          for (std::uint32_t j = 0; j < ep->rows; ++j) {
            std::span<const sss::FieldElement> row(ep->sml.data() + j * stride, stride);
            acc = f.add(acc, f.mul(sss::string_match_values(f, row, q.values, ep->symbols,
                                                            ep->alphabet),
                                   ep->su[j]));
          }
          values.push_back(acc);
        }
      }
      break;
    }
  }
  return out;
}

Bytes IquestServer::handle(ByteView request, std::vector<RowTouch>& touches) {
  switch (peek_op(request)) {
    case Op::i_ingest: {
      const auto n = ingest(decode_i_ingest(request));
      return encode_ack(Op::i_ingest, n);
    }
    case Op::i_program:
      return encode(evaluate(decode_program(request), touches));
    default:
      throw QueryError("operation not supported by an iQuest server");
  }
}

const ShareColumns* IquestServer::epoch(EpochId x) const {
  auto it = epochs_.find(x);
  return it == epochs_.end() ? nullptr : &it->second;
}

std::vector<EpochId> IquestServer::epochs() const {
  std::vector<EpochId> out;
  for (const auto& [x, _] : epochs_) out.push_back(x);
  return out;
}

void IquestServer::poison_for_testing(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (auto& [x, ep] : epochs_) {
    for (auto* col : {&ep.smid, &ep.sid, &ep.su, &ep.sml, &ep.sl}) {
      for (auto& v : *col) v = field_.from_u64(gen());
    }
  }
}

void IquestServer::save(const std::filesystem::path& path) const {
  ByteWriter w;
  w.raw(as_bytes(kMagic));
  w.u32(static_cast<std::uint32_t>(index_));
  w.u64(field_.modulus());
  w.u32(static_cast<std::uint32_t>(epochs_.size()));
  for (const auto& [x, ep] : epochs_) w.blob(encode(ep));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write store " + path.string());
  out.write(reinterpret_cast<const char*>(w.buffer().data()),
            static_cast<std::streamsize>(w.size()));
}

IquestServer IquestServer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read store " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ByteReader r(data);
  auto magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw FormatError(path.string() + " is not an iQuest store");
  }
  const auto index = static_cast<int>(r.u32());
  IquestServer s(index, r.u64());
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) s.ingest(decode_i_ingest(r.blob()));
  r.expect_done();
  return s;
}

}  // namespace quest::server
