#include "quest/iquest/share_creation.hpp"

#include <unordered_map>
#include <unordered_set>

#include "quest/errors.hpp"

namespace quest::iquest {

std::vector<std::vector<SharedRow>> create_shares_epoch(const Epoch& epoch, const SystemConfig& cfg,
                                                        DeviceDigester& digester,
                                                        LocationRegistry& registry,
                                                        const sss::PrimeField& field,
                                                        sss::RandomSource& rng) {
  const auto n = static_cast<std::uint32_t>(cfg.server_count);
  const auto alphabet = static_cast<std::uint32_t>(cfg.alphabet_size);
  std::vector<std::vector<SharedRow>> out(n);
  for (auto& rows : out) rows.resize(epoch.events.size());

  // Discarded with the epoch.
  std::unordered_map<DeviceId, std::unordered_set<LocationId>> seen;

  for (std::size_t j = 0; j < epoch.events.size(); ++j) {
    const auto& ev = epoch.events[j];
    if (ev.timestamp < epoch.begin || ev.timestamp >= epoch.end) {
      throw SealingError("event at " + std::to_string(ev.timestamp) + " lies outside epoch " +
                         std::to_string(epoch.id));
    }
    const auto digest = digester.assign(ev.device);
    const auto code = registry.code(ev.location);
    const bool unique = seen[ev.device].insert(ev.location).second;

    const auto d_sym = sss::hex_symbols(code_symbols(digest, cfg.digest_digits));
    const auto l_sym = sss::hex_symbols(code_symbols(code, cfg.digest_digits));
    auto smid = sss::make_sss(field, d_sym, n, rng, alphabet);
    const auto sid = sss::share_scalar(field, field.from_u64(digest), 1, n, rng);
    const auto su = sss::share_scalar(field, {unique ? 1u : 0u}, 1, n, rng);
    auto sml = sss::make_sss(field, l_sym, n, rng, alphabet);
    const auto sl = sss::share_scalar(field, field.from_u64(code), 1, n, rng);

    for (std::uint32_t s = 0; s < n; ++s) {
      auto& row = out[s][j];
      row.a_smid = std::move(smid[s]);
      row.a_sid = sid.shares[s];
      row.a_su = su.shares[s];
      row.a_sml = std::move(sml[s]);
      row.a_sl = sl.shares[s];
      row.a_delta = epoch.id;
    }
  }
  return out;
}

server::ShareColumns to_columns(EpochId epoch_id, std::uint32_t server_index,
                                const std::vector<SharedRow>& rows) {
  server::ShareColumns c;
  c.epoch_id = epoch_id;
  c.server_index = server_index;
  c.rows = static_cast<std::uint32_t>(rows.size());
  if (!rows.empty()) {
    c.symbols = rows.front().a_smid.symbol_count;
    c.alphabet = rows.front().a_smid.alphabet_size;
  }
  c.smid.reserve(rows.size() * c.stride());
  c.sml.reserve(rows.size() * c.stride());
  for (const auto& r : rows) {
    if (r.a_smid.server_index != server_index || r.a_sid.server_index != server_index ||
        r.a_sml.server_index != server_index) {
      throw CrossServerError("row fragments belong to another server");
    }
    if (r.a_delta != epoch_id) throw SealingError("row carries a foreign epoch id");
    if (r.a_smid.symbol_count != c.symbols || r.a_sml.symbol_count != c.symbols) {
      throw ShapeError("rows disagree on string length");
    }
    c.smid.insert(c.smid.end(), r.a_smid.values.begin(), r.a_smid.values.end());
    c.sid.push_back(r.a_sid.value);
    c.su.push_back(r.a_su.value);
    c.sml.insert(c.sml.end(), r.a_sml.values.begin(), r.a_sml.values.end());
    c.sl.push_back(r.a_sl.value);
  }
  return c;
}

}  // namespace quest::iquest
