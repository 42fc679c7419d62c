#include "quest/cquest/state.hpp"

#include <fstream>
#include <json.hpp>

#include "quest/errors.hpp"

namespace quest::cquest {

using nlohmann::json;

EngineState capture_state(const CquestEngine& engine) {
  EngineState s;
  s.s_q = engine.secret();
  s.k_pko = engine.organization_key();
  s.form = engine.uniqueness_form();
  s.outer = engine.suite().outer_key();
  s.counters = engine.export_counters();
  return s;
}

void save_state(const EngineState& state, const std::filesystem::path& path) {
  json counters = json::array();
  for (const auto& [x, blob] : state.counters) counters.push_back({{"epoch", x}, {"blob", to_hex(blob)}});
  json doc{{"protocol", "cquest"},
           {"s_q", to_hex(state.s_q)},
           {"k_pko", to_hex(state.k_pko)},
           {"uniqueness_form", state.form == UniquenessForm::direct ? "direct" : "expandable"},
           {"counters", counters}};
  if (state.outer) doc["outer_key"] = to_hex(state.outer->key_bytes);
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write engine state " + path.string());
  out << doc.dump(2) << '\n';
}

EngineState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read engine state " + path.string());
  try {
    const json doc = json::parse(in);
    if (doc.at("protocol") != "cquest") throw FormatError(path.string() + " is not cQuest state");
    EngineState s;
    s.s_q = from_hex(doc.at("s_q").get<std::string>());
    s.k_pko = from_hex(doc.at("k_pko").get<std::string>());
    s.form = doc.at("uniqueness_form") == "expandable" ? UniquenessForm::expandable
                                                       : UniquenessForm::direct;
    if (doc.contains("outer_key")) {
      s.outer = AttributeKey{from_hex(doc.at("outer_key").get<std::string>())};
    }
    for (const auto& c : doc.at("counters")) {
      s.counters.emplace_back(c.at("epoch").get<EpochId>(),
                              from_hex(c.at("blob").get<std::string>()));
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError("malformed engine state " + path.string() + ": " + e.what());
  }
}

}  // namespace quest::cquest
