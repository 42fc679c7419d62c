#include "quest/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "quest/errors.hpp"

namespace quest {

namespace {
constexpr std::string_view kHeader = "device_id,location_id,timestamp_ms";
}

std::vector<ConnectivityEvent> read_events_csv(std::istream& in) {
  std::vector<ConnectivityEvent> events;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty event file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw FormatError("unexpected CSV header: " + line);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 3 fields");
    }
    ConnectivityEvent ev;
    try {
      ev.device = DeviceId(std::string_view(line).substr(0, c1));
      ev.location = LocationId(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
    } catch (const InvalidIdentifier& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    const char* first = line.data() + c2 + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, ev.timestamp);
    if (ec != std::errc{} || ptr != last || ev.timestamp < 0) {
      throw FormatError("line " + std::to_string(line_no) + ": bad timestamp");
    }
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<ConnectivityEvent> read_events_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_events_csv(in);
}

void write_events_csv(std::ostream& out, const std::vector<ConnectivityEvent>& events) {
  out << kHeader << '\n';
  for (const auto& ev : events) {
    out << ev.device.str() << ',' << ev.location.str() << ',' << ev.timestamp << '\n';
  }
}

void write_events_csv(const std::filesystem::path& path,
                      const std::vector<ConnectivityEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_events_csv(out, events);
}

}  // namespace quest
