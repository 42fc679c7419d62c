#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fixtures.hpp"

using namespace quest;
using namespace quest::publisher;
namespace fs = std::filesystem;

TEST_CASE("verify is set membership and every call is audited") {
  std::mt19937_64 g(4);
  std::vector<DeviceId> listed;
  std::set<DeviceId> truth;
  for (int i = 0; i < 60; ++i) {
    DeviceId d(std::to_string(g() % 500));
    listed.push_back(d);
    truth.insert(d);
  }
  auto pub = Publisher::from_ids(listed, "pepper", 123);
  CHECK(pub.available());
  CHECK(pub.size() == truth.size());
  for (int i = 0; i < 500; ++i) {
    const DeviceId d(std::to_string(i));
    CHECK(pub.verify(d) == (truth.count(d) == 1));
  }
  const auto log = pub.audit_log();
  REQUIRE(log.size() == 500);
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].sequence == i + 1);
    CHECK(log[i].status == "ok");
    CHECK(log[i].device_hash == pub.hash_id(DeviceId(std::to_string(i))));
    CHECK(log[i].device_hash.find(DeviceId(std::to_string(i)).str()) == std::string::npos);
  }
}

TEST_CASE("fail-closed without a list") {
  Publisher empty;
  CHECK_FALSE(empty.verify(DeviceId("d1")));
  CHECK(empty.audit_log().at(0).status == "list-unavailable");
  auto missing = Publisher::load("/nonexistent/infected.json");
  CHECK_FALSE(missing.available());
  CHECK_FALSE(missing.verify(DeviceId("d1")));

  const auto dir = fs::temp_directory_path() / "quest_pub";
  fs::create_directories(dir);
  std::ofstream(dir / "broken.json") << "{not json";
  CHECK_FALSE(Publisher::load(dir / "broken.json").available());
  fs::remove_all(dir);
}

TEST_CASE("infected list round-trips without raw ids") {
  const auto dir = fs::temp_directory_path() / "quest_pub2";
  fs::create_directories(dir);
  auto pub = Publisher::from_ids({DeviceId("d1"), DeviceId("d2")}, "s", 99);
  pub.save(dir / "infected.json");
  std::ifstream in(dir / "infected.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["salt"] == "s");
  CHECK(j["issued_at"] == 99);
  CHECK(j["hashes"].size() == 2);
  CHECK(j.dump().find("0000000000D1") == std::string::npos);
  auto back = Publisher::load(dir / "infected.json");
  CHECK(back.verify(DeviceId("d2")));
  CHECK_FALSE(back.verify(DeviceId("d3")));
  CHECK(back.issued_at() == 99);

  std::ostringstream audit;
  back.write_audit_jsonl(audit);
  std::istringstream lines(audit.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(nlohmann::json::parse(line).contains("device_hash"));
    ++n;
  }
  CHECK(n == 2);
  fs::remove_all(dir);
}

TEST_CASE("concurrent verifies each log exactly once") {
  auto pub = Publisher::from_ids({DeviceId("1")}, "s");
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t)
    ts.emplace_back([&pub] {
      for (int i = 0; i < 250; ++i) pub.verify(DeviceId("1"));
    });
  for (auto& t : ts) t.join();
  const auto log = pub.audit_log();
  CHECK(log.size() == 1000);
  std::set<std::uint64_t> seqs;
  for (const auto& e : log) seqs.insert(e.sequence);
  CHECK(seqs.size() == 1000);
}

TEST_CASE("notification registry delivers to the opted-in intersection") {
  NotificationRegistry reg;
  CHECK(reg.record_notifications({}).empty());
  std::mt19937_64 g(5);
  std::set<DeviceId> in_reg, asked;
  for (int i = 0; i < 40; ++i) {
    DeviceId d(std::to_string(g() % 100));
    reg.add(d, "c" + std::to_string(i));
    in_reg.insert(d);
  }
  for (int i = 0; i < 40; ++i) asked.insert(DeviceId(std::to_string(g() % 100)));
  std::vector<DeviceId> expect;
  std::set_intersection(asked.begin(), asked.end(), in_reg.begin(), in_reg.end(), std::back_inserter(expect));
  CHECK(reg.record_notifications(asked) == expect);
  CHECK(reg.deliveries().size() == expect.size());
  CHECK(reg.record_notifications({DeviceId("fffff")}).empty());

  const auto path = fs::temp_directory_path() / "quest_registry.json";
  reg.save(path);
  const auto back = NotificationRegistry::load(path);
  CHECK(back.size() == reg.size());
  fs::remove(path);
}
