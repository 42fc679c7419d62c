#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "quest/config.hpp"
#include "quest/csv_io.hpp"
#include "quest/errors.hpp"
#include "quest/generator.hpp"
#include "quest/measurement.hpp"

using namespace quest;
using fixtures::kT0;

TEST_CASE("device ids canonicalize to 12 uppercase hex digits") {
  CHECK(DeviceId("d1").str() == "0000000000D1");
  CHECK(DeviceId("00:00:00:00:00:d1") == DeviceId("d1"));
  CHECK(DeviceId("aa-bb-cc-dd-ee-ff").str() == "AABBCCDDEEFF");
  CHECK_THROWS_AS(DeviceId("xyz"), InvalidIdentifier);
  CHECK_THROWS_AS(DeviceId(""), InvalidIdentifier);
  CHECK_THROWS_AS(DeviceId("1234567890abc"), InvalidIdentifier);
  std::mt19937_64 g(1);
  for (int i = 0; i < 500; ++i) {
    const auto once = canonicalize_device_id(std::to_string(g() % 1000000000));
    CHECK(canonicalize_device_id(once) == once);
  }
  CHECK_THROWS_AS(LocationId("a,b"), InvalidIdentifier);
  CHECK_THROWS_AS(LocationId(""), InvalidIdentifier);
}

TEST_CASE("epoch assignment") {
  SystemConfig cfg;
  const auto origin = stream_origin(kT0 + 17, cfg);
  CHECK(origin == kT0);
  CHECK(assign_epoch({DeviceId("1"), LocationId("a"), kT0}, cfg, origin) == 0);
  CHECK(assign_epoch({DeviceId("1"), LocationId("a"), kT0 + 900'000}, cfg, origin) == 1);
  CHECK_THROWS_AS(assign_epoch({DeviceId("1"), LocationId("a"), kT0 - 1}, cfg, origin), RejectedEvent);
  std::mt19937_64 g(2);
  for (int i = 0; i < 10000; ++i) {
    const TimestampMs t = kT0 + static_cast<TimestampMs>(g() % 100'000'000'000ULL);
    CHECK(assign_epoch({DeviceId("1"), LocationId("a"), t}, cfg, origin) == (t - kT0) / 900'000);
  }
}

TEST_CASE("epoch builder tiles time without gaps") {
  SystemConfig cfg;
  RateModel rate;
  const auto ds = generate_synthetic_events(10, 4, 0.5, rate, 3);
  const auto epochs = bucket_events(ds.events, cfg);
  std::size_t total = 0;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const auto& e = epochs[i];
    CHECK(e.id == static_cast<EpochId>(i));
    CHECK(e.end - e.begin == cfg.epoch_duration_ms());
    if (i > 0) CHECK(e.begin == epochs[i - 1].end);
    for (const auto& ev : e.events) {
      CHECK(ev.timestamp >= e.begin);
      CHECK(ev.timestamp < e.end);
    }
    total += e.events.size();
  }
  CHECK(total == ds.events.size());
}

TEST_CASE("epoch builder emits skipped empty epochs and rejects late events") {
  SystemConfig cfg;
  EpochBuilder b(cfg);
  CHECK(b.push({DeviceId("1"), LocationId("a"), kT0 + 10}).empty());
  const auto sealed = b.push({DeviceId("1"), LocationId("a"), kT0 + 3 * 900'000 + 5});
  REQUIRE(sealed.size() == 3);
  CHECK(sealed[0].events.size() == 1);
  CHECK(sealed[1].events.empty());
  CHECK(sealed[2].id == 2);
  CHECK_THROWS_AS(b.push({DeviceId("1"), LocationId("a"), kT0 + 100}), LateEvent);
  const auto last = b.flush();
  REQUIRE(last.has_value());
  CHECK(last->id == 3);
  CHECK(b.wall_clock().at(2) == kT0 + 2 * 900'000);
}

TEST_CASE("generator") {
  RateModel rate;
  const auto a = generate_synthetic_events(50, 10, 1.0, rate, 7);
  const auto b = generate_synthetic_events(50, 10, 1.0, rate, 7);
  CHECK(a.events == b.events);
  CHECK(std::is_sorted(a.events.begin(), a.events.end(),
                       [](const auto& x, const auto& y) { return x.timestamp < y.timestamp; }));
  // Some device visits two locations inside one epoch.
  SystemConfig cfg;
  std::map<std::pair<std::string, EpochId>, std::set<std::string>> seen;
  bool multi = false;
  for (const auto& ev : a.events) {
    auto& s = seen[{ev.device.str(), (ev.timestamp - rate.start) / cfg.epoch_duration_ms()}];
    s.insert(ev.location.str());
    multi = multi || s.size() >= 2;
  }
  CHECK(multi);

  RateModel one;
  one.max_events = 1;
  CHECK(generate_synthetic_events(1, 1, 1.0, one, 1).events.size() == 1);
  CHECK_THROWS_AS(generate_synthetic_events(0, 1, 1.0, one, 1), ParameterError);
}

TEST_CASE("CSV round trip and errors") {
  const auto evs = fixtures::worked_events();
  std::stringstream ss;
  write_events_csv(ss, evs);
  CHECK(ss.str().rfind("device_id,location_id,timestamp_ms\n", 0) == 0);
  CHECK(read_events_csv(ss) == evs);
  std::stringstream bad("device_id,location_id,timestamp_ms\nd1,l1\n");
  CHECK_THROWS_AS(read_events_csv(bad), FormatError);
  std::stringstream neg("device_id,location_id,timestamp_ms\nd1,l1,-5\n");
  CHECK_THROWS(read_events_csv(neg));
}

TEST_CASE("config parsing and validation") {
  const auto cfg = parse_config("# comment\nepoch_duration=600\ncapacity.l1=8\ndistance_index=0.25\n");
  CHECK(cfg.epoch_duration_s == 600);
  CHECK(cfg.occupancy_threshold(LocationId("l1")) == doctest::Approx(2.0));
  CHECK_THROWS_AS(cfg.occupancy_threshold(LocationId("l9")), ConfigError);
  CHECK(parse_config(format_config(cfg)).capacities == cfg.capacities);
  CHECK_THROWS_AS(parse_config("server_count=7\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("field_prime=100\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("digest_digits=12\nserver_count=27\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("bogus=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("distance_index=0\n"), ConfigError);
  CHECK(is_prime(sss::kMersenne61));
  CHECK_FALSE(is_prime(sss::kMersenne61 + 2));
}

TEST_CASE("measurement record freezes on seal") {
  MeasurementRecord r("q1");
  r.append_touches(2, {{0, 1, "A_L"}});
  r.append_touches(2, {{0, 2, "A_L"}});
  r.add_bytes(5, 6);
  r.add_bytes(1, 1);
  CHECK(r.accessed_rows().at(2).size() == 2);
  CHECK(r.bytes_sent_to_server() == 6);
  r.seal();
  CHECK_THROWS(r.append_touches(1, {}));
  CHECK_THROWS(r.add_bytes(1, 1));
  CHECK_THROWS(r.set_wall_time(std::chrono::nanoseconds(1)));
}

TEST_CASE("top_k and violations") {
  std::map<LocationId, std::int64_t> v{{LocationId("b"), 3}, {LocationId("a"), 3}, {LocationId("c"), 9}};
  const auto t = top_k(v, 2);
  REQUIRE(t.size() == 2);
  CHECK(t[0].location == LocationId("c"));
  CHECK(t[1].location == LocationId("a"));
  CHECK(top_k(v, 10).size() == 3);
  CHECK_THROWS_AS(top_k(v, 0), ParameterError);

  const auto cfg = fixtures::worked_config();
  OccupancyTable occ{{{0, LocationId("l1")}, 1}, {{0, LocationId("l2")}, 2}, {{1, LocationId("zz")}, 0}};
  const auto viol = find_violations(occ, cfg);
  REQUIRE(viol.size() == 1);
  CHECK(viol[0].location == LocationId("l2"));
  occ[{1, LocationId("zz")}] = 1;
  CHECK_THROWS_AS(find_violations(occ, cfg), ConfigError);
}
