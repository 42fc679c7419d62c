#pragma once

#include <iosfwd>
#include <vector>

#include "quest/measurement.hpp"

namespace quest::server {

/// Collected measurement records of a session, exportable as CSV.
class AccessLog {
 public:
  /// Stores a copy of the record; seals it first if the caller did not.
  void add(MeasurementRecord record);

  const std::vector<MeasurementRecord>& records() const noexcept { return records_; }

  /// `query_id,server,epoch_id,row_index,column`, one line per touch.
  void write_touches_csv(std::ostream& out) const;
  /// `query_id,bytes_sent,bytes_received,wall_time_us`, one line per query.
  void write_bytes_csv(std::ostream& out) const;

 private:
  std::vector<MeasurementRecord> records_;
};

}  // namespace quest::server
