#include "quest/measurement.hpp"

#include "quest/errors.hpp"

namespace quest {

void MeasurementRecord::require_open() const {
  if (sealed_) throw Error("measurement record " + query_id_ + " is sealed");
}

void MeasurementRecord::append_touches(int server, const std::vector<RowTouch>& touches) {
  require_open();
  auto& seq = accessed_rows_[server];
  seq.insert(seq.end(), touches.begin(), touches.end());
}

void MeasurementRecord::add_bytes(std::uint64_t sent, std::uint64_t received) {
  require_open();
  bytes_sent_ += sent;
  bytes_received_ += received;
}

void MeasurementRecord::set_wall_time(std::chrono::nanoseconds t) {
  require_open();
  wall_time_ = t;
}

}  // namespace quest
