#include "quest/iquest/state.hpp"

#include <fstream>
#include <json.hpp>

#include "quest/errors.hpp"

namespace quest::iquest {

using nlohmann::json;

EngineState capture_state(const IquestEngine& engine) {
  EngineState s;
  s.digest_key = engine.digester().key();
  s.digests = engine.digester().assignments();
  s.locations = engine.registry().entries();
  s.registry_frozen = engine.registry().frozen();
  return s;
}

void restore_state(IquestEngine& engine, const EngineState& state) {
  if (state.digest_key != engine.digester().key()) {
    throw KeyDerivationError("state was written under a different digest key");
  }
  engine.digester().restore(state.digests);
  engine.registry().restore(state.locations, state.registry_frozen);
}

void save_state(const EngineState& state, const std::filesystem::path& path) {
  json digests = json::object();
  for (const auto& [d, v] : state.digests) digests[d.str()] = v;
  json locations = json::object();
  for (const auto& [l, c] : state.locations) locations[l.str()] = c;
  const json doc{{"protocol", "iquest"},
                 {"digest_key", to_hex(state.digest_key)},
                 {"digests", digests},
                 {"locations", locations},
                 {"registry_frozen", state.registry_frozen}};
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write engine state " + path.string());
  out << doc.dump(2) << '\n';
}

EngineState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read engine state " + path.string());
  try {
    const json doc = json::parse(in);
    if (doc.at("protocol") != "iquest") throw FormatError(path.string() + " is not iQuest state");
    EngineState s;
    s.digest_key = from_hex(doc.at("digest_key").get<std::string>());
    for (const auto& [id, v] : doc.at("digests").items()) s.digests[DeviceId(id)] = v.get<std::uint64_t>();
    for (const auto& [l, c] : doc.at("locations").items()) {
      s.locations[LocationId(l)] = c.get<std::uint64_t>();
    }
    s.registry_frozen = doc.value("registry_frozen", false);
    return s;
  } catch (const json::exception& e) {
    throw FormatError("malformed engine state " + path.string() + ": " + e.what());
  }
}

}  // namespace quest::iquest
