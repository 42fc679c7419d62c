#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "quest/cquest/state.hpp"
#include "quest/cquest/tuple_codec.hpp"
#include "quest/errors.hpp"
#include "quest/generator.hpp"
#include "quest/oracle/oracle.hpp"

using namespace quest;
using namespace quest::cquest;
using fixtures::kT0;

namespace {

CipherSuite suite_for(std::uint64_t org = 2) {
  return CipherSuite(fixtures::key_bytes(1), fixtures::key_bytes(org));
}

Epoch random_epoch(std::uint64_t seed, std::size_t n_events) {
  RateModel rate;
  rate.events_per_device_per_hour = 400;
  rate.max_events = n_events;
  auto ds = generate_synthetic_events(30, 8, 900.0 / 86400.0, rate, seed);
  Epoch e;
  e.id = 0;
  e.begin = rate.start;
  e.end = rate.start + 900'000;
  for (const auto& ev : ds.events)
    if (ev.timestamp < e.end) e.events.push_back(ev);
  return e;
}

std::vector<LocationId> locs(std::initializer_list<const char*> names) {
  std::vector<LocationId> out;
  for (auto n : names) out.emplace_back(n);
  return out;
}

}  // namespace

TEST_CASE("key derivation") {
  const auto a = derive_keys(fixtures::key_bytes(1), fixtures::key_bytes(2));
  const auto b = derive_keys(fixtures::key_bytes(1), fixtures::key_bytes(2));
  const auto c = derive_keys(fixtures::key_bytes(1), fixtures::key_bytes(3));
  CHECK(a == b);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (i != j) CHECK(a[i] != a[j]);
      CHECK(a[i] != c[j]);
    }
  }
  CHECK(a[2].key_bytes.back() == 3);
  CHECK_THROWS_AS(derive_keys(fixtures::key_bytes(1, 32), fixtures::key_bytes(2, 16)),
                  KeyDerivationError);
  CHECK_THROWS_AS(derive_keys(Bytes{}, Bytes{}), KeyDerivationError);
}

TEST_CASE("deterministic cipher round-trips and rejects foreign ciphertexts") {
  const auto keys = derive_keys(fixtures::key_bytes(1), fixtures::key_bytes(2));
  sss::SeededRng rng(4);
  for (int t = 0; t < 200; ++t) {
    Bytes m(rng.uniform_below(300));
    for (auto& b : m) b = static_cast<std::uint8_t>(rng.next_u64());
    for (const auto& k : keys) {
      DeterministicCipher c(k);
      const auto ct = c.encrypt(m);
      CHECK(ct.size() == m.size() + DeterministicCipher::kIvBytes);
      CHECK(c.encrypt(m) == ct);
      CHECK(c.decrypt(ct) == m);
    }
    auto ct = DeterministicCipher(keys[0]).encrypt(m);
    CHECK_THROWS_AS(DeterministicCipher(keys[1]).decrypt(ct), DecryptionError);
    ct.back() ^= 1;
    CHECK_THROWS_AS(DeterministicCipher(keys[0]).decrypt(ct), DecryptionError);
  }
}

TEST_CASE("tuple plaintexts decode to what was written") {
  const DeviceId d("d1");
  const auto first = decode_device(device_first_plaintext(d, 7));
  CHECK(first.device == d);
  CHECK(first.first);
  CHECK(first.epoch == 7);
  CHECK_FALSE(decode_device(device_repeat_plaintext(d, 99, 7)).first);
  CHECK(device_first_plaintext(d, 7) != device_first_plaintext(d, 8));

  const auto u = decode_uniqueness(unique_plaintext(3, 5));
  CHECK(u.unique);
  CHECK(u.row == 3);
  CHECK(u.epoch == 5);
  CHECK_FALSE(decode_uniqueness(repeat_plaintext(42)).unique);

  const auto l = decode_location(location_plaintext(LocationId("l2"), 2, 9));
  CHECK(l.location == LocationId("l2"));
  CHECK(l.counter == 2);
  CHECK(l.epoch == 9);

  const auto real = combined_locations_plaintext(1, locs({"l1", "l2"}), 512);
  const auto fake = fake_locations_plaintext(2, 512);
  CHECK(real.size() == 512);
  CHECK(fake.size() == 512);
  CHECK(decode_combined_locations(real) == locs({"l1", "l2"}));
  CHECK_FALSE(decode_combined_locations(fake).has_value());
  CHECK(decode_epoch(epoch_plaintext(-3)) == -3);
  CHECK_THROWS_AS(combined_locations_plaintext(1, locs({"l1", "l2"}), 8), EncodingError);
}

TEST_CASE("worked epoch encrypts to the expected relation structure") {
  const auto suite = suite_for();
  sss::SeededRng rng(1);
  const auto enc = encrypt_epoch(fixtures::worked_epoch(), suite, {}, rng);
  REQUIRE(enc.rows.size() == 4);

  // Row 1: searchable d1 token, its combined list is (l1, l2).
  CHECK(enc.rows[0].a_id == suite.id().encrypt(device_first_plaintext(DeviceId("d1"), 0)));
  CHECK(decode_combined_locations(suite.combined_locations().decrypt(enc.rows[0].a_cl)) ==
        locs({"l1", "l2"}));
  // Row 2: d2's own list, not the l1 printed in the original table.
  CHECK(decode_combined_locations(suite.combined_locations().decrypt(enc.rows[1].a_cl)) ==
        locs({"l2"}));
  // Row 3: non-searchable a_id, location counter (l2, 2).
  CHECK_FALSE(decode_device(suite.id().decrypt(enc.rows[2].a_id)).first);
  const auto l3 = decode_location(suite.location().decrypt(enc.rows[2].a_l));
  CHECK(l3.location == LocationId("l2"));
  CHECK(l3.counter == 2);
  CHECK_FALSE(decode_combined_locations(suite.combined_locations().decrypt(enc.rows[2].a_cl)));
  // Row 4: repeat uniqueness.
  CHECK_FALSE(decode_uniqueness(suite.uniqueness().decrypt(enc.rows[3].a_u)).unique);
  // Rows 1-3 are unique with y = row number.
  for (int i = 0; i < 3; ++i) {
    const auto u = decode_uniqueness(suite.uniqueness().decrypt(enc.rows[i].a_u));
    CHECK(u.unique);
    CHECK(u.row == i + 1);
  }
  CHECK(enc.metadata.max_counter == 2);
  CHECK(enc.metadata.device_count == 2);
  CHECK(enc.metadata.location_counters.at(LocationId("l1")) == 2);

  const auto counts = decode_htab_counts(suite, enc.htab_counts);
  CHECK(counts.epoch_id == 0);
  REQUIRE(counts.locations.size() == 2);
  CHECK(counts.locations[0].unique_devices == 1);
  CHECK(counts.locations[1].unique_devices == 2);
  const auto members = decode_htab_members(suite, enc.htab_members);
  CHECK(members.members.at(LocationId("l2")) ==
        std::vector<DeviceId>{DeviceId("d2"), DeviceId("d1")});
}

TEST_CASE("single event epoch") {
  const auto suite = suite_for();
  sss::SeededRng rng(2);
  Epoch e{3, kT0, kT0 + 900'000, {{DeviceId("aa"), LocationId("x"), kT0 + 5}}};
  const auto enc = encrypt_epoch(e, suite, {}, rng);
  REQUIRE(enc.rows.size() == 1);
  CHECK(enc.metadata.max_counter == 1);
  CHECK(decode_combined_locations(suite.combined_locations().decrypt(enc.rows[0].a_cl)) ==
        locs({"x"}));
}

TEST_CASE("events outside the epoch are a sealing error") {
  const auto suite = suite_for();
  sss::SeededRng rng(2);
  Epoch e{0, kT0, kT0 + 900'000, {{DeviceId("aa"), LocationId("x"), kT0 + 900'000}}};
  CHECK_THROWS_AS(encrypt_epoch(e, suite, {}, rng), SealingError);
}

TEST_CASE("decrypting a random epoch matches a cleartext replay") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto e = random_epoch(seed, 500);
    REQUIRE(e.events.size() >= 400);
    const auto shadow = fixtures::shadow_encrypt(e);
    const auto suite = suite_for();
    sss::SeededRng rng(seed);
    const auto enc = encrypt_epoch(e, suite, {}, rng);
    REQUIRE(enc.rows.size() == shadow.size());
    for (std::size_t i = 0; i < shadow.size(); ++i) {
      const auto& s = shadow[i];
      const auto& ev = e.events[i];
      const auto dev = decode_device(suite.id().decrypt(enc.rows[i].a_id));
      CHECK(dev.device == ev.device);
      CHECK(dev.first == s.first);
      CHECK(dev.epoch == 0);
      const auto u = decode_uniqueness(suite.uniqueness().decrypt(enc.rows[i].a_u));
      CHECK(u.unique == s.unique);
      if (s.unique) CHECK(u.row == s.y);
      const auto l = decode_location(suite.location().decrypt(enc.rows[i].a_l));
      CHECK(l.location == ev.location);
      CHECK(l.counter == s.counter);
      const auto cl = decode_combined_locations(suite.combined_locations().decrypt(enc.rows[i].a_cl));
      CHECK(cl.has_value() == s.locations.has_value());
      if (cl && s.locations) {
        std::vector<std::string> names;
        for (const auto& x : *cl) names.push_back(x.str());
        CHECK(names == *s.locations);
      }
      CHECK(decode_epoch(suite.epoch().decrypt(enc.rows[i].a_delta)) == 0);
      CHECK(enc.rows[i].a_cl.size() == enc.rows[0].a_cl.size());
    }
  }
}

TEST_CASE("no repeated ciphertexts within an epoch column") {
  const auto e = random_epoch(21, 500);
  sss::SeededRng rng(21);
  for (auto form : {UniquenessForm::direct, UniquenessForm::expandable}) {
    const CipherSuite suite(fixtures::key_bytes(1), fixtures::key_bytes(2),
                            AttributeKey{fixtures::key_bytes(77)});
    const auto enc = encrypt_epoch(e, suite, {form, 512}, rng);
    std::set<Bytes> ids, us, ls;
    for (const auto& r : enc.rows) {
      ids.insert(r.a_id);
      us.insert(r.a_u);
      ls.insert(r.a_l);
    }
    CHECK(ids.size() == enc.rows.size());
    CHECK(us.size() == enc.rows.size());
    CHECK(ls.size() == enc.rows.size());
  }
}

TEST_CASE("two organizations share no ciphertexts") {
  const auto e = random_epoch(22, 300);
  sss::SeededRng rng(1);
  const auto a = encrypt_epoch(e, suite_for(2), {}, rng);
  const auto b = encrypt_epoch(e, suite_for(3), {}, rng);
  std::set<Bytes> seen;
  for (const auto& r : a.rows)
    for (const auto* c : {&r.a_id, &r.a_u, &r.a_l, &r.a_cl, &r.a_delta}) seen.insert(*c);
  std::size_t common = 0;
  for (const auto& r : b.rows)
    for (const auto* c : {&r.a_id, &r.a_u, &r.a_l, &r.a_cl, &r.a_delta}) common += seen.count(*c);
  CHECK(common == 0);
}

TEST_CASE("searchable token hits exactly one row per device and epoch") {
  const auto e = random_epoch(23, 500);
  const auto suite = suite_for();
  sss::SeededRng rng(1);
  const auto enc = encrypt_epoch(e, suite, {}, rng);
  std::set<DeviceId> devices;
  for (const auto& ev : e.events) devices.insert(ev.device);
  for (const auto& d : devices) {
    const auto tok = suite.id().encrypt(device_first_plaintext(d, 0));
    int hits = 0;
    for (const auto& r : enc.rows) hits += r.a_id == tok;
    CHECK(hits == 1);
  }
}

TEST_CASE("worked epoch through the engine") {
  const auto cfg = fixtures::worked_config();
  fixtures::CquestRig rig(cfg, UniquenessForm::expandable, 5);
  rig.ingest({fixtures::worked_epoch()});
  auto pub = fixtures::publisher_for({DeviceId("d1")});
  const EpochRange r{0, 0};

  CHECK(rig.engine->location_trace(DeviceId("d1"), r, pub) ==
        std::set<LocationId>{LocationId("l1"), LocationId("l2")});
  CHECK(rig.engine->last_trapdoor_count() == 1);

  CHECK(rig.engine->global_max_counter() == 2);
  CHECK(rig.engine->user_trace(DeviceId("d1"), r, pub, CounterMode::global_max) ==
        std::set<DeviceId>{DeviceId("d2")});
  // one A_id token, then E(l1,1), E(l1,2), E(l2,1), E(l2,2)
  CHECK(rig.engine->last_trapdoor_count() == 5);

  for (auto mode : {UniquenessMode::baseline, UniquenessMode::token, UniquenessMode::htab}) {
    const auto v = rig.engine->social_distance(r, mode, true);
    REQUIRE(v.size() == 1);
    CHECK(v[0].location == LocationId("l2"));
    CHECK(v[0].unique_count == 2);
    CHECK(v[0].devices == std::vector<DeviceId>{DeviceId("d1"), DeviceId("d2")});
    const auto cf = rig.engine->crowd_flow(r, 2, mode);
    REQUIRE(cf.size() == 2);
    CHECK(cf[0].location == LocationId("l2"));
    CHECK(cf[0].unique_visitors == 2);
    CHECK(cf[1].unique_visitors == 1);
  }
}

TEST_CASE("unverified devices never reach the server") {
  fixtures::CquestRig rig(fixtures::worked_config(), UniquenessForm::direct, 5);
  rig.ingest({fixtures::worked_epoch()});
  auto pub = fixtures::publisher_for({DeviceId("d1")});
  const auto before = rig.cluster.channel.total_sent();
  CHECK_THROWS_AS(rig.engine->location_trace(DeviceId("d2"), {0, 0}, pub), UnauthorizedQuery);
  CHECK_THROWS_AS(rig.engine->user_trace(DeviceId("d2"), {0, 0}, pub, CounterMode::per_epoch),
                  UnauthorizedQuery);
  pub.set_available(false);
  CHECK_THROWS_AS(rig.engine->location_trace(DeviceId("d1"), {0, 0}, pub), UnauthorizedQuery);
  CHECK(rig.cluster.channel.total_sent() == before);
}

TEST_CASE("engine edge cases") {
  auto cfg = fixtures::worked_config();
  fixtures::CquestRig rig(cfg, UniquenessForm::direct, 5);
  rig.ingest({fixtures::worked_epoch()});
  auto pub = fixtures::publisher_for({DeviceId("d1"), DeviceId("77")});
  CHECK(rig.engine->social_distance({0, -1}, UniquenessMode::baseline).empty());
  CHECK(rig.engine->location_trace(DeviceId("77"), {0, 0}, pub).empty());
  CHECK(rig.engine->crowd_flow({0, 0}, 10, UniquenessMode::htab).size() == 2);
  CHECK_THROWS_AS(rig.engine->crowd_flow({0, 0}, 0, UniquenessMode::htab), ParameterError);
  CHECK_THROWS_AS(rig.engine->social_distance({0, 0}, UniquenessMode::token), CapabilityError);
  CHECK_THROWS_AS(rig.ingest({fixtures::worked_epoch()}), IngestionError);

  Epoch alone{1, kT0 + 900'000, kT0 + 1'800'000, {{DeviceId("d1"), LocationId("l1"), kT0 + 900'001}}};
  rig.ingest({alone});
  CHECK(rig.engine->user_trace(DeviceId("d1"), {1, 1}, pub, CounterMode::per_epoch).empty());

  fixtures::CquestRig unknown(SystemConfig{}, UniquenessForm::direct, 6);
  unknown.ingest({fixtures::worked_epoch()});
  CHECK_THROWS_AS(unknown.engine->social_distance({0, 0}, UniquenessMode::htab), ConfigError);

  server::CquestCluster c;
  CHECK_THROWS_AS(CquestEngine(cfg, fixtures::key_bytes(1), fixtures::key_bytes(2), c.channel,
                               UniquenessForm::expandable),
                  KeyDerivationError);
}

TEST_CASE("counter modes agree on results with non-increasing trapdoor counts") {
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    RateModel rate;
    rate.max_events = 1200;
    const auto ds = generate_synthetic_events(25, 6, 0.125, rate, seed);
    const auto cfg = fixtures::config_with_threshold(ds.locations, 3);
    const auto epochs = bucket_events(ds.events, cfg);
    fixtures::CquestRig rig(cfg, UniquenessForm::direct, seed);
    rig.ingest(epochs);
    const auto oracle = oracle::CleartextRelation(epochs, cfg);
    auto pub = fixtures::publisher_for(ds.devices);
    const auto range = oracle.full_range();
    for (int i = 0; i < 5; ++i) {
      const auto& d = ds.devices[static_cast<std::size_t>(i)];
      const auto g = rig.engine->user_trace(d, range, pub, CounterMode::global_max);
      const auto ng = rig.engine->last_trapdoor_count();
      const auto e = rig.engine->user_trace(d, range, pub, CounterMode::per_epoch);
      const auto ne = rig.engine->last_trapdoor_count();
      const auto el = rig.engine->user_trace(d, range, pub, CounterMode::per_epoch_location);
      const auto nel = rig.engine->last_trapdoor_count();
      CHECK(g == oracle.user_trace(d, range));
      CHECK(e == g);
      CHECK(el == g);
      CHECK(nel <= ne);
      CHECK(ne <= ng);
      CHECK(g == fixtures::pair_scan_contacts(ds.events, cfg, d, range));
    }
  }
}

TEST_CASE("uniqueness modes agree with each other and the oracle") {
  for (std::uint64_t seed = 200; seed < 204; ++seed) {
    RateModel rate;
    rate.max_events = 1500;
    const auto ds = generate_synthetic_events(40, 6, 0.125, rate, seed);
    const auto cfg = fixtures::config_with_threshold(ds.locations, 4);
    const auto epochs = bucket_events(ds.events, cfg);
    fixtures::CquestRig rig(cfg, UniquenessForm::expandable, seed);
    rig.ingest(epochs);
    const oracle::CleartextRelation oracle(epochs, cfg);
    const auto range = oracle.full_range();
    const auto expected = oracle.social_distance(range);
    REQUIRE_FALSE(expected.empty());
    for (auto mode : {UniquenessMode::baseline, UniquenessMode::token, UniquenessMode::htab}) {
      CHECK(rig.engine->social_distance(range, mode, true) == expected);
      CHECK(rig.engine->crowd_flow(range, 3, mode) == oracle.crowd_flow(range, 3));
      CHECK(rig.engine->crowd_flow({range.first, range.first}, 3, mode) ==
            oracle.crowd_flow({range.first, range.first}, 3));
    }
    const auto tab = fixtures::hash_tabulate(ds.events, cfg, range);
    for (const auto& v : expected)
      CHECK(tab.at({v.epoch_id, v.location.str()}) == static_cast<std::size_t>(v.unique_count));
  }
}

TEST_CASE("crowd flow top-1 on skewed data is the hotspot") {
  RateModel rate;
  rate.hotspot_skew = 2.0;
  const auto ds = generate_synthetic_events(60, 10, 0.25, rate, 5);
  const auto cfg = fixtures::config_with_threshold(ds.locations, 5);
  fixtures::CquestRig rig(cfg, UniquenessForm::direct, 5);
  const auto epochs = bucket_events(ds.events, cfg);
  rig.ingest(epochs);
  const auto top = rig.engine->crowd_flow({0, epochs.back().id}, 1, UniquenessMode::htab);
  REQUIRE(top.size() == 1);
  CHECK(top[0].location == ds.hotspot);
}

TEST_CASE("notify returns the registered intersection") {
  fixtures::CquestRig rig(fixtures::worked_config(), UniquenessForm::direct, 5);
  publisher::NotificationRegistry reg;
  CHECK(rig.engine->notify({}, reg).empty());
  reg.add(DeviceId("a1"), "a1@example.org");
  reg.add(DeviceId("a2"), "+15550100");
  CHECK(rig.engine->notify({DeviceId("b1")}, reg).empty());
  CHECK(rig.engine->notify({DeviceId("a2"), DeviceId("b1")}, reg) ==
        std::vector<DeviceId>{DeviceId("a2")});
  CHECK(reg.deliveries().size() == 1);
}

TEST_CASE("engine state and server store survive a restart") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "quest_cquest_state";
  fs::create_directories(dir);
  const auto cfg = fixtures::worked_config();
  std::set<DeviceId> before;
  {
    fixtures::CquestRig rig(cfg, UniquenessForm::expandable, 9);
    rig.ingest({fixtures::worked_epoch()});
    auto pub = fixtures::publisher_for({DeviceId("d1")});
    before = rig.engine->user_trace(DeviceId("d1"), {0, 0}, pub, CounterMode::per_epoch_location);
    save_state(capture_state(*rig.engine), dir / "engine.json");
    rig.cluster.server.save(dir / "server.bin");
  }
  const auto st = load_state(dir / "engine.json");
  server::CquestCluster cluster(server::CquestServer::load(dir / "server.bin"));
  CquestEngine engine(cfg, st.s_q, st.k_pko, cluster.channel, st.form, st.outer);
  engine.import_counters(st.counters);
  CHECK(engine.global_max_counter() == 2);
  auto pub = fixtures::publisher_for({DeviceId("d1")});
  CHECK(engine.user_trace(DeviceId("d1"), {0, 0}, pub, CounterMode::per_epoch_location) == before);
  CHECK(engine.social_distance({0, 0}, UniquenessMode::token).size() == 1);
  fs::remove_all(dir);
}
