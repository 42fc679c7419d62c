#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "quest/model.hpp"

namespace quest {

// Flat key=value config. Recognised keys mirror SystemConfig:
//   epoch_duration, digest_digits, alphabet_size, server_count, field_prime,
//   distance_index, top_k, acl_pad_bytes, capacity.<location_id>
// Blank lines and lines starting with '#' are ignored.
SystemConfig parse_config(std::string_view text);
SystemConfig load_config(const std::filesystem::path& path);

std::string format_config(const SystemConfig& cfg);
void save_config(const SystemConfig& cfg, const std::filesystem::path& path);

}  // namespace quest
