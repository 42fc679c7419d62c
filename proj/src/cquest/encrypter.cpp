#include "quest/cquest/encrypter.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "quest/cquest/tuple_codec.hpp"
#include "quest/errors.hpp"

namespace quest::cquest {

CipherSuite::CipherSuite(ByteView s_q, ByteView k_pko, std::optional<AttributeKey> outer)
    : outer_key_(std::move(outer)) {
  ciphers_.reserve(6);
  for (std::uint8_t id = 1; id <= 6; ++id) {
    ciphers_.emplace_back(derive_attribute_key(s_q, k_pko, id));
  }
  if (outer_key_) outer_.emplace(*outer_key_);
}

const DeterministicCipher& CipherSuite::outer() const {
  if (!outer_) throw CapabilityError("no outer uniqueness key available");
  return *outer_;
}

Bytes unique_gamma(const CipherSuite& suite, EpochId x) {
  return suite.uniqueness().encrypt(unique_inner_plaintext(x));
}

Bytes expand_gamma(const DeterministicCipher& outer, ByteView gamma, std::int64_t y) {
  return outer.encrypt(unique_outer_plaintext(gamma, y));
}

Bytes unique_token(const CipherSuite& suite, UniquenessForm form, std::int64_t y, EpochId x) {
  if (form == UniquenessForm::direct) return suite.uniqueness().encrypt(unique_plaintext(y, x));
  return expand_gamma(suite.outer(), unique_gamma(suite, x), y);
}

EncryptedEpoch encrypt_epoch(const Epoch& epoch, const CipherSuite& suite,
                             const EncryptOptions& options, sss::RandomSource& rng) {
  const EpochId x = epoch.id;

  // l_i for every device: its distinct locations in order of first visit.
  std::unordered_map<DeviceId, std::vector<LocationId>> full_lists;
  for (const auto& ev : epoch.events) {
    auto& list = full_lists[ev.device];
    if (std::find(list.begin(), list.end(), ev.location) == list.end()) list.push_back(ev.location);
  }

  // HTab_id / alpha: locations seen so far per device. HTab_L: counters.
  std::unordered_map<DeviceId, std::unordered_set<LocationId>> alpha;
  std::map<LocationId, std::uint64_t> counters;
  std::map<LocationId, std::vector<DeviceId>> members;
  const Bytes a_delta = suite.epoch().encrypt(epoch_plaintext(x));

  EncryptedEpoch out;
  out.epoch_id = x;
  out.rows.reserve(epoch.events.size());
  std::uint64_t c_max = 0;
  std::int64_t y = 0;
  for (const auto& ev : epoch.events) {
    ++y;
    if (ev.timestamp < epoch.begin || ev.timestamp >= epoch.end) {
      throw SealingError("event at " + std::to_string(ev.timestamp) + " lies outside epoch " +
                         std::to_string(x));
    }
    const std::uint64_t r = rng.next_u64();
    EncryptedRow row;

    auto seen = alpha.find(ev.device);
    const bool first = seen == alpha.end();
    if (first) seen = alpha.emplace(ev.device, std::unordered_set<LocationId>{}).first;
    const bool new_location = seen->second.insert(ev.location).second;

    row.a_id = first ? suite.id().encrypt(device_first_plaintext(ev.device, x))
                     : suite.id().encrypt(device_repeat_plaintext(ev.device, r, x));
    if (new_location) {
      row.a_u = unique_token(suite, options.uniqueness, y, x);
      members[ev.location].push_back(ev.device);
    } else {
      row.a_u = suite.uniqueness().encrypt(repeat_plaintext(r));
    }

    const std::uint64_t c = ++counters[ev.location];
    row.a_l = suite.location().encrypt(location_plaintext(ev.location, c, x));
    c_max = std::max(c_max, c);

    row.a_cl = suite.combined_locations().encrypt(
        first ? combined_locations_plaintext(r, full_lists.at(ev.device), options.acl_pad_bytes)
              : fake_locations_plaintext(r, options.acl_pad_bytes));
    row.a_delta = a_delta;
    out.rows.push_back(std::move(row));
  }

  ByteWriter counts;
  counts.i64(x);
  counts.u32(static_cast<std::uint32_t>(counters.size()));
  for (const auto& [loc, c] : counters) {
    counts.str(loc.str());
    counts.u64(members[loc].size());
    counts.u64(c);
  }
  out.htab_counts = suite.location_table().encrypt(counts.buffer());

  ByteWriter mem;
  mem.i64(x);
  mem.u32(static_cast<std::uint32_t>(members.size()));
  for (const auto& [loc, devs] : members) {
    mem.str(loc.str());
    mem.u32(static_cast<std::uint32_t>(devs.size()));
    for (const auto& d : devs) mem.str(d.str());
  }
  out.htab_members = suite.location_table().encrypt(mem.buffer());

  auto& meta = out.metadata;
  meta.epoch_id = x;
  meta.row_count = epoch.events.size();
  meta.device_count = alpha.size();
  meta.max_counter = c_max;
  meta.location_counters = counters;
  std::uint64_t bytes = 0;
  for (const auto& [d, locs] : alpha) {
    bytes += d.str().size() + sizeof(std::uint64_t);
    for (const auto& l : locs) bytes += l.str().size();
  }
  for (const auto& [l, c] : counters) bytes += l.str().size() + sizeof(c);
  meta.table_bytes = bytes;
  return out;
}

DecodedCounts decode_htab_counts(const CipherSuite& suite, ByteView blob) {
  const Bytes plain = suite.location_table().decrypt(blob);
  ByteReader r(plain);
  DecodedCounts out;
  out.epoch_id = r.i64();
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    LocationCount lc;
    lc.location = LocationId(r.str());
    lc.unique_devices = r.u64();
    lc.counter = r.u64();
    out.locations.push_back(std::move(lc));
  }
  r.expect_done();
  return out;
}

DecodedMembers decode_htab_members(const CipherSuite& suite, ByteView blob) {
  const Bytes plain = suite.location_table().decrypt(blob);
  ByteReader r(plain);
  DecodedMembers out;
  out.epoch_id = r.i64();
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    LocationId loc(r.str());
    const auto m = r.u32();
    auto& devs = out.members[loc];
    for (std::uint32_t j = 0; j < m; ++j) devs.emplace_back(r.str());
  }
  r.expect_done();
  return out;
}

}  // namespace quest::cquest
