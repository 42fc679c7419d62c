#pragma once

#include <filesystem>
#include <map>

#include "quest/iquest/engine.hpp"

namespace quest::iquest {

struct EngineState {
  Bytes digest_key;
  std::map<DeviceId, std::uint64_t> digests;
  std::map<LocationId, std::uint64_t> locations;
  bool registry_frozen = false;
};

EngineState capture_state(const IquestEngine& engine);
/// Replaces the engine's digest assignments and location registry.
void restore_state(IquestEngine& engine, const EngineState& state);

void save_state(const EngineState& state, const std::filesystem::path& path);
EngineState load_state(const std::filesystem::path& path);

}  // namespace quest::iquest
