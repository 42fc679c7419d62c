#pragma once

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "quest/cquest/engine.hpp"

namespace quest::cquest {

/// Everything the trusted host needs to resume querying after a restart.
struct EngineState {
  Bytes s_q;
  Bytes k_pko;
  UniquenessForm form = UniquenessForm::direct;
  std::optional<AttributeKey> outer;
  std::vector<std::pair<EpochId, Bytes>> counters;
};

EngineState capture_state(const CquestEngine& engine);
void save_state(const EngineState& state, const std::filesystem::path& path);
EngineState load_state(const std::filesystem::path& path);

}  // namespace quest::cquest
