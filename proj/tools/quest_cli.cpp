#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "quest/config.hpp"
#include "quest/cquest/engine.hpp"
#include "quest/cquest/state.hpp"
#include "quest/csv_io.hpp"
#include "quest/epoch_builder.hpp"
#include "quest/errors.hpp"
#include "quest/generator.hpp"
#include "quest/iquest/engine.hpp"
#include "quest/iquest/state.hpp"
#include "quest/oracle/oracle.hpp"
#include "quest/publisher/publisher.hpp"
#include "quest/server/access_log.hpp"
#include "quest/server/cluster.hpp"
#include "quest/sss/rng.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace quest::cli {

enum ExitCode : int { kOk = 0, kDiffer = 1, kUsage = 2, kUnauthorized = 3, kFailure = 4 };

class UsageError : public Error {
 public:
  using Error::Error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sha256_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(out[i]);
  return hex.str();
}

/// Key material for one deployment, all derived from --seed.
Bytes derive_key(std::uint64_t seed, std::uint64_t label) {
  sss::SeededRng rng(seed * 0x9e3779b97f4a7c15ULL ^ label);
  Bytes out(32);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.next_u64());
  return out;
}

constexpr std::uint64_t kSecretLabel = 0x51, kOrgLabel = 0x0a, kOuterLabel = 0x07, kDigestLabel = 0xd1;

struct Options {
  std::string out = "quest-out";
  std::string config;
  std::uint64_t seed = 1;
};

/// Collects everything a run leaves behind and writes manifest.json once.
class Run {
 public:
  Run(const Options& opt, std::string command) : out_(opt.out) {
    manifest_["command"] = std::move(command);
    manifest_["seed"] = opt.seed;
    manifest_["queries"] = json::array();
    manifest_["outputs"] = json::array();
    fs::create_directories(out_);
  }

  const fs::path& out() const noexcept { return out_; }

  fs::path output(const fs::path& rel) {
    const auto p = out_ / rel;
    fs::create_directories(p.parent_path());
    manifest_["outputs"].push_back(rel.generic_string());
    return p;
  }

  void set_config(const SystemConfig& cfg) { manifest_["config"] = format_config(cfg); }
  void set_dataset(const fs::path& events) {
    manifest_["dataset"] = {{"path", events.string()}, {"sha256", sha256_hex(events)}};
  }
  void set(const std::string& key, json value) { manifest_[key] = std::move(value); }
  void log_query(json q) { manifest_["queries"].push_back(std::move(q)); }

  void finish(int status) {
    manifest_["exit_code"] = status;
    std::ofstream(out_ / "manifest.json") << manifest_.dump(2) << "\n";
  }

 private:
  fs::path out_;
  json manifest_;
};

SystemConfig resolve_config(const Options& opt, const fs::path& fallback) {
  if (!opt.config.empty()) return load_config(opt.config);
  if (fs::exists(fallback)) return load_config(fallback);
  throw UsageError("no config: pass --config or run gen first");
}

void write_json(const fs::path& path, const json& j) { std::ofstream(path) << j.dump(2) << "\n"; }

// ---------------------------------------------------------------- gen

struct GenArgs {
  int devices = 50;
  int locations = 10;
  double days = 0.25;
  double rate = 16.0;
  std::size_t max_events = 0;
  double skew = 1.0;
  std::int64_t capacity = 40;
  int infected = 3;
};

int cmd_gen(const Options& opt, const GenArgs& a) {
  Run run(opt, "gen");
  RateModel rate;
  rate.events_per_device_per_hour = a.rate;
  rate.max_events = a.max_events;
  rate.hotspot_skew = a.skew;
  const auto ds = generate_synthetic_events(a.devices, a.locations, a.days, rate, opt.seed);

  SystemConfig cfg = opt.config.empty() ? SystemConfig{} : load_config(opt.config);
  for (const auto& l : ds.locations) cfg.capacities.try_emplace(l, a.capacity);
  cfg.validate();

  const auto events_path = run.output("events.csv");
  write_events_csv(events_path, ds.events);
  save_config(cfg, run.output("quest.conf"));

  std::vector<DeviceId> infected(ds.devices.begin(),
                                 ds.devices.begin() + std::min<std::size_t>(a.infected, ds.devices.size()));
  publisher::Publisher::from_ids(infected, "seed-" + std::to_string(opt.seed), rate.start)
      .save(run.output("infected.json"));
  publisher::NotificationRegistry reg;
  for (std::size_t i = 0; i < ds.devices.size(); i += 2) reg.add(ds.devices[i], "device-" + std::to_string(i));
  reg.save(run.output("registry.json"));

  run.set_config(cfg);
  run.set_dataset(events_path);
  json listed = json::array();
  for (const auto& d : infected) listed.push_back(d.str());
  write_json(run.output("results/gen.json"), {{"events", ds.events.size()},
                                              {"devices", ds.devices.size()},
                                              {"locations", ds.locations.size()},
                                              {"hotspot", ds.hotspot.str()},
                                              {"infected", listed}});
  std::cout << "generated " << ds.events.size() << " events, " << ds.devices.size() << " devices, "
            << ds.locations.size() << " locations -> " << events_path.string() << "\n";
  run.finish(kOk);
  return kOk;
}

// ---------------------------------------------------------------- ingest

struct IngestStats {
  std::size_t tuples = 0;
  std::size_t epochs = 0;
  double seconds = 0;
  std::uint64_t upload_bytes = 0;
  std::uint64_t stored_bytes = 0;
  std::uint64_t metadata_bytes = 0;        // persistent on the trusted host
  std::uint64_t transient_table_bytes = 0;  // cQuest per-epoch tables, dropped at sealing

  double tuples_per_min() const { return seconds > 0 ? tuples / seconds * 60.0 : 0.0; }
};

struct CquestDeployment {
  server::CquestCluster cluster;
  std::unique_ptr<cquest::CquestEngine> engine;

  CquestDeployment(const SystemConfig& cfg, std::uint64_t seed, cquest::UniquenessForm form) {
    std::optional<cquest::AttributeKey> outer;
    if (form == cquest::UniquenessForm::expandable) {
      outer = cquest::AttributeKey{derive_key(seed, kOuterLabel)};
      cluster.server.set_outer_key(*outer);
    }
    engine = std::make_unique<cquest::CquestEngine>(cfg, derive_key(seed, kSecretLabel),
                                                    derive_key(seed, kOrgLabel), cluster.channel, form,
                                                    outer);
  }

  CquestDeployment(const SystemConfig& cfg, const fs::path& dir)
      : cluster(server::CquestServer::load(dir / "server.bin")) {
    const auto st = cquest::load_state(dir / "engine.json");
    engine = std::make_unique<cquest::CquestEngine>(cfg, st.s_q, st.k_pko, cluster.channel, st.form, st.outer);
    engine->import_counters(st.counters);
  }

  IngestStats ingest(const std::vector<Epoch>& epochs, std::uint64_t seed) {
    sss::SeededRng rng(seed);
    IngestStats s;
    const auto t0 = Clock::now();
    for (const auto& e : epochs) {
      const auto md = engine->ingest_epoch(e, rng);
      s.tuples += e.events.size();
      s.transient_table_bytes += md.table_bytes;
    }
    s.seconds = seconds_since(t0);
    s.epochs = epochs.size();
    s.upload_bytes = cluster.channel.total_sent();
    s.stored_bytes = cluster.server.stored_bytes();
    for (const auto& [x, blob] : engine->export_counters()) s.metadata_bytes += sizeof(x) + blob.size();
    return s;
  }

  void save(const fs::path& dir) const {
    fs::create_directories(dir);
    cluster.server.save(dir / "server.bin");
    cquest::save_state(cquest::capture_state(*engine), dir / "engine.json");
  }
};

struct IquestDeployment {
  server::IquestCluster cluster;
  std::unique_ptr<iquest::IquestEngine> engine;

  IquestDeployment(const SystemConfig& cfg, std::uint64_t seed) : cluster(cfg) {
    engine = std::make_unique<iquest::IquestEngine>(cfg, derive_key(seed, kDigestLabel), cluster.channels(),
                                                    std::make_unique<sss::SeededRng>(seed));
  }

  IquestDeployment(const SystemConfig& cfg, const fs::path& dir, std::uint64_t seed)
      : cluster(load_servers(cfg, dir)) {
    const auto st = iquest::load_state(dir / "engine.json");
    engine = std::make_unique<iquest::IquestEngine>(cfg, st.digest_key, cluster.channels(),
                                                    std::make_unique<sss::SeededRng>(seed ^ 0x9));
    iquest::restore_state(*engine, st);
  }

  static std::vector<server::IquestServer> load_servers(const SystemConfig& cfg, const fs::path& dir) {
    std::vector<server::IquestServer> out;
    for (int i = 1; i <= cfg.server_count; ++i) {
      out.push_back(server::IquestServer::load(dir / ("server_" + std::to_string(i) + ".bin")));
    }
    return out;
  }

  IngestStats ingest(const std::vector<Epoch>& epochs) {
    IngestStats s;
    const auto t0 = Clock::now();
    for (const auto& e : epochs) {
      s.upload_bytes += engine->ingest_epoch(e);
      s.tuples += e.events.size();
    }
    s.seconds = seconds_since(t0);
    s.epochs = epochs.size();
    for (std::size_t i = 1; i <= cluster.size(); ++i) s.stored_bytes += cluster.server(int(i)).stored_bytes();
    const auto st = iquest::capture_state(*engine);
    for (const auto& [d, code] : st.digests) s.metadata_bytes += d.str().size() + sizeof(code);
    for (const auto& [l, code] : st.locations) s.metadata_bytes += l.str().size() + sizeof(code);
    return s;
  }

  void save(const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 1; i <= cluster.size(); ++i) {
      cluster.server(int(i)).save(dir / ("server_" + std::to_string(i) + ".bin"));
    }
    iquest::save_state(iquest::capture_state(*engine), dir / "engine.json");
  }
};

struct IngestArgs {
  std::string mode;
  std::string events;
  std::string uniqueness = "expandable";
};

json stats_json(const IngestStats& s) {
  return {{"tuples", s.tuples},
          {"epochs", s.epochs},
          {"seconds", s.seconds},
          {"tuples_per_min", s.tuples_per_min()},
          {"upload_bytes", s.upload_bytes},
          {"stored_bytes", s.stored_bytes},
          {"metadata_bytes", s.metadata_bytes},
          {"transient_table_bytes", s.transient_table_bytes}};
}

int cmd_ingest(const Options& opt, const IngestArgs& a) {
  Run run(opt, "ingest");
  run.set("mode", a.mode);
  const fs::path events_path = a.events.empty() ? run.out() / "events.csv" : fs::path(a.events);
  if (!fs::exists(events_path)) throw UsageError("no dataset at " + events_path.string());
  auto cfg = resolve_config(opt, events_path.parent_path() / "quest.conf");
  cfg.validate();
  run.set_config(cfg);
  run.set_dataset(events_path);

  const auto events = read_events_csv(events_path);
  const auto epochs = bucket_events(events, cfg);
  const auto store = run.out() / "store";
  fs::create_directories(store);
  if (fs::absolute(events_path) != fs::absolute(store / "events.csv")) {
    fs::copy_file(events_path, store / "events.csv", fs::copy_options::overwrite_existing);
  }
  save_config(cfg, store / "quest.conf");

  IngestStats s;
  if (a.mode == "cquest") {
    const auto form = a.uniqueness == "direct" ? cquest::UniquenessForm::direct : cquest::UniquenessForm::expandable;
    CquestDeployment dep(cfg, opt.seed, form);
    s = dep.ingest(epochs, opt.seed);
    dep.save(store / "cquest");
    run.set("uniqueness_form", a.uniqueness);
  } else {
    IquestDeployment dep(cfg, opt.seed);
    s = dep.ingest(epochs);
    dep.save(store / "iquest");
  }
  run.output("store/" + a.mode);

  std::ofstream csv(run.output("metrics/ingest_" + a.mode + ".csv"));
  csv << "mode,tuples,epochs,seconds,tuples_per_min,upload_bytes,stored_bytes,metadata_bytes,"
         "transient_table_bytes\n"
      << a.mode << "," << s.tuples << "," << s.epochs << "," << s.seconds << "," << s.tuples_per_min() << ","
      << s.upload_bytes << "," << s.stored_bytes << "," << s.metadata_bytes << "," << s.transient_table_bytes
      << "\n";
  write_json(run.output("results/ingest_" + a.mode + ".json"), stats_json(s));

  std::cout << a.mode << ": ingested " << s.tuples << " tuples in " << s.epochs << " epochs, "
            << std::fixed << std::setprecision(0) << s.tuples_per_min() << " tuples/min\n"
            << "  upload " << s.upload_bytes << " B, stored " << s.stored_bytes << " B, metadata "
            << s.metadata_bytes << " B";
  if (a.mode == "cquest") std::cout << ", sealed tables " << s.transient_table_bytes << " B";
  std::cout << "\n";
  run.finish(kOk);
  return kOk;
}

// ---------------------------------------------------------------- query

struct QueryArgs {
  std::string app;
  std::string mode = "cquest";
  std::string device;
  std::optional<EpochId> from;
  std::optional<EpochId> to;
  std::optional<int> k;
  std::string opt = "none";
  std::string infected;
  std::string registry;
};

json violations_json(const std::vector<Violation>& v) { return oracle::to_json(v); }

void check_opt(const QueryArgs& a) {
  static const std::map<std::string, std::map<std::string, std::set<std::string>>> allowed{
      {"cquest",
       {{"location-trace", {"none"}},
        {"user-trace", {"none", "counters"}},
        {"social-distance", {"none", "token", "htab"}},
        {"crowd-flow", {"none", "token", "htab"}}}},
      {"iquest",
       {{"location-trace", {"none"}},
        {"user-trace", {"none"}},
        {"social-distance", {"none", "aggregate"}},
        {"crowd-flow", {"none", "aggregate"}}}},
  };
  if (!allowed.at(a.mode).at(a.app).count(a.opt)) {
    throw UsageError("--opt " + a.opt + " does not apply to " + a.app + " under " + a.mode);
  }
  const bool trace = a.app == "location-trace" || a.app == "user-trace";
  if (trace && a.device.empty()) throw UsageError(a.app + " needs --device");
  if (!trace && !a.device.empty()) throw UsageError(a.app + " takes no --device");
  if (a.app != "crowd-flow" && a.k) throw UsageError("--k only applies to crowd-flow");
}

cquest::UniquenessMode uniqueness_mode(const std::string& opt) {
  if (opt == "token") return cquest::UniquenessMode::token;
  if (opt == "htab") return cquest::UniquenessMode::htab;
  return cquest::UniquenessMode::baseline;
}

int cmd_query(const Options& opt, const QueryArgs& a) {
  check_opt(a);
  Run run(opt, "query");
  run.set("mode", a.mode);
  const auto store = run.out() / "store";
  const auto dir = store / a.mode;
  if (!fs::exists(dir / "engine.json")) {
    throw UsageError("no " + a.mode + " store under " + store.string() + "; run ingest first");
  }
  auto cfg = resolve_config(opt, store / "quest.conf");
  run.set_config(cfg);
  run.set_dataset(store / "events.csv");
  const auto oracle = oracle::CleartextRelation::from_events(read_events_csv(store / "events.csv"), cfg);
  EpochRange range = oracle.full_range();
  if (a.from) range.first = *a.from;
  if (a.to) range.last = *a.to;
  const int k = a.k.value_or(cfg.top_k);

  const fs::path infected_path = a.infected.empty() ? run.out() / "infected.json" : fs::path(a.infected);
  auto publisher = publisher::Publisher::load(infected_path);
  const fs::path registry_path = a.registry.empty() ? run.out() / "registry.json" : fs::path(a.registry);
  std::optional<publisher::NotificationRegistry> registry;
  if (fs::exists(registry_path)) registry = publisher::NotificationRegistry::load(registry_path);

  const std::string qid = a.app + "/" + a.mode + "/" + a.opt;
  MeasurementRecord rec(qid);
  json protocol, expected, extra = json::object();
  std::optional<DeviceId> device;
  if (!a.device.empty()) device = DeviceId(a.device);

  auto audit = [&] {
    std::ofstream out(run.output("results/audit.jsonl"));
    publisher.write_audit_jsonl(out);
  };

  std::set<DeviceId> contacts;
  try {
    if (a.mode == "cquest") {
      CquestDeployment dep(cfg, dir);
      auto& e = *dep.engine;
      if (a.app == "location-trace") {
        protocol = oracle::to_json(e.location_trace(*device, range, publisher, &rec));
      } else if (a.app == "user-trace") {
        const auto cm = a.opt == "counters" ? cquest::CounterMode::per_epoch_location : cquest::CounterMode::global_max;
        contacts = e.user_trace(*device, range, publisher, cm, &rec);
        protocol = oracle::to_json(contacts);
      } else if (a.app == "social-distance") {
        protocol = violations_json(e.social_distance(range, uniqueness_mode(a.opt), true, &rec));
      } else {
        protocol = oracle::to_json(e.crowd_flow(range, k, uniqueness_mode(a.opt), &rec));
      }
      extra["trapdoors"] = e.last_trapdoor_count();
    } else {
      IquestDeployment dep(cfg, dir, opt.seed);
      auto& e = *dep.engine;
      const bool agg = a.opt == "aggregate";
      if (a.app == "location-trace") {
        protocol = oracle::to_json(e.location_trace(*device, range, publisher, &rec));
      } else if (a.app == "user-trace") {
        contacts = e.user_trace(*device, range, publisher, &rec);
        protocol = oracle::to_json(contacts);
      } else if (a.app == "social-distance") {
        protocol = violations_json(e.social_distance(range, agg, true, &rec));
      } else {
        protocol = oracle::to_json(e.crowd_flow(range, k, agg, &rec));
      }
      extra["response_shares_per_server"] = e.last_response_shares();
    }
  } catch (const UnauthorizedQuery&) {
    audit();
    run.log_query({{"query", a.app}, {"mode", a.mode}, {"device", a.device}, {"verdict", "UNAUTHORIZED"}});
    run.finish(kUnauthorized);
    throw;
  }
  audit();

  if (a.app == "location-trace") expected = oracle::to_json(oracle.location_trace(*device, range));
  else if (a.app == "user-trace") expected = oracle::to_json(oracle.user_trace(*device, range));
  else if (a.app == "social-distance") expected = violations_json(oracle.social_distance(range));
  else expected = oracle::to_json(oracle.crowd_flow(range, k));

  if (a.app == "user-trace" && registry) {
    json notified = json::array();
    for (const auto& d : registry->record_notifications(contacts)) notified.push_back(d.str());
    extra["notified"] = notified;
  }

  const bool equal = protocol == expected;
  rec.seal();
  server::AccessLog log;
  log.add(rec);
  const std::string stem = a.app + "_" + a.mode + "_" + a.opt;
  {
    std::ofstream t(run.output("metrics/" + stem + "_touches.csv"));
    log.write_touches_csv(t);
    std::ofstream b(run.output("metrics/" + stem + "_bytes.csv"));
    log.write_bytes_csv(b);
  }
  json result{{"query", a.app},
              {"mode", a.mode},
              {"opt", a.opt},
              {"range", {range.first, range.last}},
              {"protocol", protocol},
              {"oracle", expected},
              {"verdict", equal ? "EQUAL" : "DIFFER"},
              {"bytes_sent", rec.bytes_sent_to_server()},
              {"bytes_received", rec.bytes_received_from_server()}};
  if (device) result["device"] = device->str();
  if (a.app == "crowd-flow") result["k"] = k;
  result.update(extra);
  write_json(run.output("results/" + stem + ".json"), result);
  run.log_query(result);

  std::cout << "protocol: " << protocol.dump() << "\n"
            << "oracle:   " << expected.dump() << "\n";
  if (extra.contains("notified")) std::cout << "notified: " << extra["notified"].dump() << "\n";
  std::cout << "bytes: sent " << rec.bytes_sent_to_server() << ", received " << rec.bytes_received_from_server()
            << "\n"
            << "verdict: " << (equal ? "EQUAL" : "DIFFER") << "\n";
  const int code = equal ? kOk : kDiffer;
  run.finish(code);
  return code;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::size_t> sizes{1000, 10000, 100000};
  std::vector<std::int64_t> durations{900};
  int devices = 200;
  int locations = 20;
  double rate = 16.0;
};

int cmd_bench(const Options& opt, const BenchArgs& a) {
  Run run(opt, "bench");
  const auto csv_path = run.output("metrics/bench.csv");
  std::ofstream csv(csv_path);
  csv << "rows,epoch_duration_s,protocol,epochs,seconds,tuples_per_min,upload_bytes,stored_bytes,"
         "metadata_bytes,transient_table_bytes,sd_baseline_bytes,sd_optimized_bytes\n";
  json rows = json::array();
  std::vector<tools::BarGroup> groups;
  bool ordering = true;

  std::cout << std::left << std::setw(9) << "rows" << std::setw(8) << "epoch" << std::setw(8) << "proto"
            << std::setw(14) << "tuples/min" << std::setw(14) << "metadata B" << std::setw(14) << "SD base B"
            << "SD opt B\n";
  for (const auto size : a.sizes) {
    RateModel rate;
    rate.events_per_device_per_hour = a.rate;
    rate.max_events = size;
    const double days = 1.05 * static_cast<double>(size) / (a.devices * a.rate * 24.0);
    const auto ds = generate_synthetic_events(a.devices, a.locations, days, rate, opt.seed + size);
    for (const auto duration : a.durations) {
      SystemConfig cfg = opt.config.empty() ? SystemConfig{} : load_config(opt.config);
      cfg.epoch_duration_s = duration;
      for (const auto& l : ds.locations) cfg.capacities.try_emplace(l, 40);
      cfg.validate();
      const auto epochs = bucket_events(ds.events, cfg);
      EpochRange full{0, static_cast<EpochId>(epochs.size()) - 1};

      CquestDeployment c(cfg, opt.seed, cquest::UniquenessForm::expandable);
      const auto cs = c.ingest(epochs, opt.seed);
      MeasurementRecord cb, co;
      c.engine->social_distance(full, cquest::UniquenessMode::baseline, false, &cb);
      c.engine->social_distance(full, cquest::UniquenessMode::htab, false, &co);

      IquestDeployment i(cfg, opt.seed);
      const auto is = i.ingest(epochs);
      MeasurementRecord ib, io;
      i.engine->social_distance(full, false, false, &ib);
      i.engine->social_distance(full, true, false, &io);

      auto emit = [&](const char* proto, const IngestStats& s, const MeasurementRecord& base,
                      const MeasurementRecord& optd) {
        csv << ds.events.size() << "," << duration << "," << proto << "," << s.epochs << "," << s.seconds << ","
            << s.tuples_per_min() << "," << s.upload_bytes << "," << s.stored_bytes << "," << s.metadata_bytes
            << "," << s.transient_table_bytes << "," << base.bytes_received_from_server() << ","
            << optd.bytes_received_from_server() << "\n";
        auto j = stats_json(s);
        j["protocol"] = proto;
        j["epoch_duration_s"] = duration;
        j["sd_baseline_bytes"] = base.bytes_received_from_server();
        j["sd_optimized_bytes"] = optd.bytes_received_from_server();
        rows.push_back(j);
        std::cout << std::left << std::setw(9) << ds.events.size() << std::setw(8) << duration << std::setw(8)
                  << proto << std::setw(14) << static_cast<long long>(s.tuples_per_min()) << std::setw(14)
                  << s.metadata_bytes << std::setw(14) << base.bytes_received_from_server()
                  << optd.bytes_received_from_server() << "\n";
      };
      emit("cquest", cs, cb, co);
      emit("iquest", is, ib, io);
      ordering = ordering && cs.tuples_per_min() > is.tuples_per_min();
      groups.push_back({std::to_string(ds.events.size()) + "/" + std::to_string(duration) + "s",
                        {cs.tuples_per_min(), is.tuples_per_min()}});
    }
  }
  csv.close();
  tools::write_bar_svg(run.output("plots/bench_throughput.svg"), "Ingest throughput", "tuples/min",
                       {"cQuest", "iQuest"}, groups, true);
  write_json(run.output("results/bench.json"), {{"rows", rows}, {"cquest_faster_everywhere", ordering}});
  std::cout << "cQuest ingest faster than iQuest at every point: " << (ordering ? "yes" : "no") << "\n";
  run.finish(kOk);
  return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  int queries = 10;
  EpochId from = 0;
  EpochId to = 3;
};

int cmd_report(const Options& opt, const ReportArgs& a) {
  if (a.queries < 1) throw UsageError("--queries must be >= 1");
  Run run(opt, "report");
  const auto stored = run.out() / "store" / "events.csv";
  std::vector<ConnectivityEvent> events;
  SystemConfig cfg;
  if (fs::exists(stored)) {
    events = read_events_csv(stored);
    cfg = resolve_config(opt, run.out() / "store" / "quest.conf");
    run.set_dataset(stored);
  } else {
    RateModel rate;
    rate.events_per_device_per_hour = 16.67;
    const auto ds = generate_synthetic_events(50, 10, 0.25, rate, opt.seed);
    events = ds.events;
    cfg = opt.config.empty() ? SystemConfig{} : load_config(opt.config);
    for (const auto& l : ds.locations) cfg.capacities.try_emplace(l, 32);
    const auto p = run.output("results/report_events.csv");
    write_events_csv(p, events);
    run.set_dataset(p);
  }
  cfg.validate();
  run.set_config(cfg);
  const auto epochs = bucket_events(events, cfg);
  const EpochRange full{0, static_cast<EpochId>(epochs.size()) - 1};
  const EpochRange window{a.from, std::min<EpochId>(a.to, full.last)};

  std::vector<DeviceId> devices;
  for (const auto& ev : events) {
    if (std::find(devices.begin(), devices.end(), ev.device) == devices.end()) devices.push_back(ev.device);
  }
  std::sort(devices.begin(), devices.end());
  devices.resize(std::min<std::size_t>(devices.size(), static_cast<std::size_t>(a.queries)));
  auto pub = publisher::Publisher::from_ids(devices, "report-" + std::to_string(opt.seed));

  CquestDeployment c(cfg, opt.seed, cquest::UniquenessForm::expandable);
  c.ingest(epochs, opt.seed);
  IquestDeployment i(cfg, opt.seed);
  i.ingest(epochs);

  // Row offsets so every stored row gets one y coordinate.
  std::map<EpochId, std::size_t> offset;
  std::size_t acc = 0;
  for (const auto& e : epochs) {
    offset[e.id] = acc;
    acc += e.events.size();
  }

  server::AccessLog access;
  tools::ScatterSeries cs{"cQuest server", {}}, is{"iQuest server 1", {}};
  std::vector<std::vector<RowTouch>> iq_seq;
  std::set<std::vector<std::pair<EpochId, std::uint32_t>>> cq_seq;
  for (std::size_t q = 0; q < devices.size(); ++q) {
    MeasurementRecord cr("cquest/location-trace/" + devices[q].str());
    c.engine->location_trace(devices[q], window, pub, &cr);
    MeasurementRecord ir("iquest/location-trace/" + devices[q].str());
    i.engine->location_trace(devices[q], window, pub, &ir);
    std::vector<std::pair<EpochId, std::uint32_t>> rows;
    for (const auto& [server, touches] : cr.accessed_rows()) {
      for (const auto& t : touches) {
        rows.emplace_back(t.epoch_id, t.row_index);
        cs.points.emplace_back(double(q) + 0.8, double(offset[t.epoch_id] + t.row_index));
      }
    }
    cq_seq.insert(rows);
    const auto& first = ir.accessed_rows().at(1);
    iq_seq.push_back(first);
    std::set<std::size_t> seen;
    for (const auto& t : first) {
      if (seen.insert(offset[t.epoch_id] + t.row_index).second) {
        is.points.emplace_back(double(q) + 1.2, double(offset[t.epoch_id] + t.row_index));
      }
    }
    access.add(cr);
    access.add(ir);
  }
  const bool iq_identical =
      std::all_of(iq_seq.begin(), iq_seq.end(), [&](const auto& s) { return s == iq_seq.front(); });
  {
    std::ofstream out(run.output("metrics/access_touches.csv"));
    access.write_touches_csv(out);
  }
  tools::write_scatter_svg(run.output("plots/access_pattern.svg"), "Rows touched per location-trace query",
                           "query", "stored row", {cs, is});

  // Transfer table over the full range.
  struct Case {
    std::string protocol, query, opt;
  };
  const std::vector<Case> cases{
      {"cquest", "location-trace", "none"},    {"cquest", "user-trace", "none"},
      {"cquest", "user-trace", "counters"},    {"cquest", "social-distance", "none"},
      {"cquest", "social-distance", "token"},  {"cquest", "social-distance", "htab"},
      {"cquest", "crowd-flow", "htab"},        {"iquest", "location-trace", "none"},
      {"iquest", "user-trace", "none"},        {"iquest", "social-distance", "none"},
      {"iquest", "social-distance", "aggregate"}, {"iquest", "crowd-flow", "none"},
  };
  std::ofstream table(run.output("metrics/transfer.csv"));
  table << "protocol,query,opt,bytes_sent,bytes_received,response_shares_per_server\n";
  std::vector<tools::BarGroup> bars;
  json transfer = json::array();
  const auto& d0 = devices.front();
  for (const auto& k : cases) {
    MeasurementRecord r(k.protocol + "/" + k.query + "/" + k.opt);
    std::size_t shares = 0;
    if (k.protocol == "cquest") {
      auto& e = *c.engine;
      if (k.query == "location-trace") e.location_trace(d0, full, pub, &r);
      else if (k.query == "user-trace")
        e.user_trace(d0, full, pub, k.opt == "counters" ? cquest::CounterMode::per_epoch_location
                                                        : cquest::CounterMode::global_max, &r);
      else if (k.query == "social-distance") e.social_distance(full, uniqueness_mode(k.opt), false, &r);
      else e.crowd_flow(full, cfg.top_k, uniqueness_mode(k.opt), &r);
    } else {
      auto& e = *i.engine;
      if (k.query == "location-trace") e.location_trace(d0, full, pub, &r);
      else if (k.query == "user-trace") e.user_trace(d0, full, pub, &r);
      else if (k.query == "social-distance") e.social_distance(full, k.opt == "aggregate", false, &r);
      else e.crowd_flow(full, cfg.top_k, false, &r);
      shares = e.last_response_shares();
    }
    table << k.protocol << "," << k.query << "," << k.opt << "," << r.bytes_sent_to_server() << ","
          << r.bytes_received_from_server() << "," << shares << "\n";
    transfer.push_back({{"protocol", k.protocol},
                        {"query", k.query},
                        {"opt", k.opt},
                        {"bytes_sent", r.bytes_sent_to_server()},
                        {"bytes_received", r.bytes_received_from_server()}});
    const std::string tag = (k.protocol == "cquest" ? "c:" : "i:") + k.query.substr(0, k.query.find('-') + 2) +
                            (k.opt == "none" ? "" : "/" + k.opt);
    bars.push_back({tag, {double(r.bytes_sent_to_server()), double(r.bytes_received_from_server())}});
  }
  table.close();
  tools::write_bar_svg(run.output("plots/transfer.svg"), "Bytes per query", "bytes", {"sent", "received"},
                       bars, true);

  write_json(run.output("results/report.json"), {{"queries", devices.size()},
                                                 {"window", {window.first, window.last}},
                                                 {"iquest_sequences_identical", iq_identical},
                                                 {"cquest_distinct_sequences", cq_seq.size()},
                                                 {"transfer", transfer}});
  std::cout << devices.size() << " location-trace queries over epochs " << window.first << ".." << window.last
            << ": iQuest touch sequences identical: " << (iq_identical ? "yes" : "no")
            << ", cQuest distinct sequences: " << cq_seq.size() << "\n"
            << "wrote plots/access_pattern.svg, plots/transfer.svg, metrics/transfer.csv\n";
  run.finish(kOk);
  return kOk;
}

}  // namespace quest::cli

int main(int argc, char** argv) {
  using namespace quest::cli;
  CLI::App app{"Privacy-preserving WiFi analytics over encrypted and secret-shared stores"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--out", opt.out, "Output directory")->capture_default_str();
  app.add_option("--config", opt.config, "key=value system config")->check(CLI::ExistingFile);
  app.add_option("--seed", opt.seed, "Seed for every random choice")->capture_default_str();

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic association stream");
  g->add_option("--devices", gen.devices)->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--locations", gen.locations)->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--days", gen.days)->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--rate", gen.rate, "Events per device per hour")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--max-events", gen.max_events, "Truncate the stream (0 = no limit)")->capture_default_str();
  g->add_option("--skew", gen.skew, "Zipf exponent over locations")->check(CLI::NonNegativeNumber)->capture_default_str();
  g->add_option("--capacity", gen.capacity, "Capacity of every location")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--infected", gen.infected, "Devices put on the infected list")->check(CLI::NonNegativeNumber)->capture_default_str();

  IngestArgs ing;
  auto* in = app.add_subcommand("ingest", "Encrypt or share a dataset into a server store");
  in->add_option("--mode", ing.mode)->required()->check(CLI::IsMember({"cquest", "iquest"}));
  in->add_option("--events", ing.events, "Events CSV (default <out>/events.csv)")->check(CLI::ExistingFile);
  in->add_option("--uniqueness", ing.uniqueness, "cQuest unique-row form")
      ->check(CLI::IsMember({"direct", "expandable"}))
      ->capture_default_str();

  QueryArgs q;
  auto* qu = app.add_subcommand("query", "Run one application against the store and the oracle");
  qu->add_option("application", q.app)
      ->required()
      ->check(CLI::IsMember({"location-trace", "user-trace", "social-distance", "crowd-flow"}));
  qu->add_option("--mode", q.mode)->check(CLI::IsMember({"cquest", "iquest"}))->capture_default_str();
  qu->add_option("--device", q.device);
  qu->add_option("--from", q.from, "First epoch id");
  qu->add_option("--to", q.to, "Last epoch id");
  qu->add_option("--k", q.k, "Crowd-flow result size")->check(CLI::Range(1, std::numeric_limits<int>::max()));
  qu->add_option("--opt", q.opt)
      ->check(CLI::IsMember({"none", "counters", "token", "htab", "aggregate"}))
      ->capture_default_str();
  qu->add_option("--infected", q.infected, "Publisher list (default <out>/infected.json)");
  qu->add_option("--registry", q.registry, "Notification registry (default <out>/registry.json)");

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Ingest throughput and transfer sweep");
  be->add_option("--sizes", bench.sizes, "Dataset sizes in rows")->delimiter(',')->capture_default_str();
  be->add_option("--durations", bench.durations, "Epoch durations in seconds")->delimiter(',')->capture_default_str();
  be->add_option("--devices", bench.devices)->check(CLI::PositiveNumber)->capture_default_str();
  be->add_option("--locations", bench.locations)->check(CLI::PositiveNumber)->capture_default_str();

  ReportArgs rep;
  auto* re = app.add_subcommand("report", "Access-pattern scatter and transfer tables");
  re->add_option("--queries", rep.queries, "Distinct devices to trace")->capture_default_str();
  re->add_option("--from", rep.from)->capture_default_str();
  re->add_option("--to", rep.to)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen(opt, gen);
    if (*in) return cmd_ingest(opt, ing);
    if (*qu) return cmd_query(opt, q);
    if (*be) {
      for (auto s : bench.sizes)
        if (s == 0) throw UsageError("--sizes entries must be positive");
      for (auto d : bench.durations)
        if (d <= 0) throw UsageError("--durations entries must be positive");
      return cmd_bench(opt, bench);
    }
    return cmd_report(opt, rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const quest::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const quest::UnauthorizedQuery& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kUnauthorized;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
