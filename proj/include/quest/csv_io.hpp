#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "quest/model.hpp"

namespace quest {

// Event interchange format: header `device_id,location_id,timestamp_ms`,
// one event per LF-terminated line.
std::vector<ConnectivityEvent> read_events_csv(std::istream& in);
std::vector<ConnectivityEvent> read_events_csv(const std::filesystem::path& path);

void write_events_csv(std::ostream& out, const std::vector<ConnectivityEvent>& events);
void write_events_csv(const std::filesystem::path& path,
                      const std::vector<ConnectivityEvent>& events);

}  // namespace quest
