#include <doctest.h>

#include "fixtures.hpp"
#include "quest/errors.hpp"
#include "quest/generator.hpp"
#include "quest/oracle/oracle.hpp"

using namespace quest;
using namespace quest::oracle;
using fixtures::kT0;

TEST_CASE("worked epoch") {
  const auto cfg = fixtures::worked_config();
  const auto o = CleartextRelation::from_events(fixtures::worked_events(), cfg);
  const EpochRange r{0, 0};
  CHECK(o.location_trace(DeviceId("d1"), r) == std::set<LocationId>{LocationId("l1"), LocationId("l2")});
  CHECK(o.location_trace(DeviceId("ff"), r).empty());
  CHECK(o.user_trace(DeviceId("d1"), r) == std::set<DeviceId>{DeviceId("d2")});
  const auto v = o.social_distance(r);
  REQUIRE(v.size() == 1);
  CHECK(v[0].location == LocationId("l2"));
  CHECK(v[0].unique_count == 2);
  const auto cf = o.crowd_flow(r, 2);
  REQUIRE(cf.size() == 2);
  CHECK(cf[0] == CrowdFlowEntry{LocationId("l2"), 2});
  CHECK(cf[1] == CrowdFlowEntry{LocationId("l1"), 1});
  CHECK_THROWS_AS(o.crowd_flow(r, 0), ParameterError);
}

TEST_CASE("singleton stream") {
  const auto cfg = fixtures::worked_config();
  const auto o = CleartextRelation::from_events({{DeviceId("a"), LocationId("l1"), kT0}}, cfg);
  CHECK(o.user_trace(DeviceId("a"), {0, 0}).empty());
  CHECK(o.social_distance({0, 0}).empty());
  CHECK(o.crowd_flow({0, 0}, 3) == std::vector<CrowdFlowEntry>{{LocationId("l1"), 1}});
  const auto missing = CleartextRelation::from_events(
      {{DeviceId("a"), LocationId("qq"), kT0}, {DeviceId("b"), LocationId("qq"), kT0}},
      fixtures::worked_config());
  CHECK_THROWS_AS(missing.social_distance({0, 0}), ConfigError);
}

TEST_CASE("random streams agree with independent scans") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RateModel rate;
    rate.max_events = 1500;
    const auto ds = generate_synthetic_events(30, 6, 0.25, rate, seed);
    const auto cfg = fixtures::config_with_threshold(ds.locations, 3);
    const auto o = CleartextRelation::from_events(ds.events, cfg);
    const auto full = o.full_range();
    for (const auto& d : ds.devices) {
      CHECK(o.location_trace(d, full) == fixtures::scan_locations(ds.events, cfg, d, full));
      CHECK(o.user_trace(d, full) == fixtures::pair_scan_contacts(ds.events, cfg, d, full));
      CHECK(o.user_trace(d, full) == o.user_trace(d, full));
    }
    const auto tab = fixtures::hash_tabulate(ds.events, cfg, full);
    const auto occ = o.occupancy(full);
    REQUIRE(occ.size() == tab.size());
    for (const auto& [k, n] : occ) CHECK(tab.at({k.first, k.second.str()}) == static_cast<std::size_t>(n));
    for (const auto& v : o.social_distance(full)) {
      CHECK(static_cast<double>(v.unique_count) > cfg.occupancy_threshold(v.location));
      CHECK(v.devices.size() == static_cast<std::size_t>(v.unique_count));
    }
  }
}

TEST_CASE("widening the range never loses a location or contact") {
  RateModel rate;
  rate.max_events = 2000;
  const auto ds = generate_synthetic_events(25, 6, 0.25, rate, 9);
  const auto cfg = fixtures::config_with_threshold(ds.locations, 3);
  const auto o = CleartextRelation::from_events(ds.events, cfg);
  const auto full = o.full_range();
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& d = ds.devices[i];
    std::set<LocationId> prev_l;
    std::set<DeviceId> prev_c;
    for (EpochId last = full.first; last <= full.last; ++last) {
      const auto l = o.location_trace(d, {full.first, last});
      const auto c = o.user_trace(d, {full.first, last});
      CHECK(std::includes(l.begin(), l.end(), prev_l.begin(), prev_l.end()));
      CHECK(std::includes(c.begin(), c.end(), prev_c.begin(), prev_c.end()));
      prev_l = l;
      prev_c = c;
    }
  }
}

TEST_CASE("sliding-window contacts") {
  const auto cfg = fixtures::worked_config();
  // Same location, 2 minutes apart but across an epoch boundary.
  const std::vector<ConnectivityEvent> evs{
      {DeviceId("a"), LocationId("l1"), kT0 + 899'000},
      {DeviceId("b"), LocationId("l1"), kT0 + 1'019'000},
  };
  const auto epochwise = CleartextRelation::from_events(evs, cfg);
  CHECK(epochwise.user_trace(DeviceId("a"), {0, 1}).empty());
  const auto sliding = CleartextRelation::from_events(evs, cfg, {true, 300'000});
  CHECK(sliding.user_trace(DeviceId("a"), {0, 1}) == std::set<DeviceId>{DeviceId("b")});
  const auto narrow = CleartextRelation::from_events(evs, cfg, {true, 60'000});
  CHECK(narrow.user_trace(DeviceId("a"), {0, 1}).empty());
}

TEST_CASE("JSON forms") {
  const auto j = to_json(std::vector<Violation>{{LocationId("l2"), 0, 2, {DeviceId("d1")}}});
  CHECK(j[0]["location"] == "l2");
  CHECK(j[0]["devices"][0] == "0000000000D1");
  CHECK(to_json(std::set<LocationId>{LocationId("b"), LocationId("a")}).dump() == R"(["a","b"])");
}
