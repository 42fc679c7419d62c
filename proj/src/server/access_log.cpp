#include "quest/server/access_log.hpp"

#include <ostream>

namespace quest::server {

void AccessLog::add(MeasurementRecord record) {
  record.seal();
  records_.push_back(std::move(record));
}

void AccessLog::write_touches_csv(std::ostream& out) const {
  out << "query_id,server,epoch_id,row_index,column\n";
  for (const auto& rec : records_) {
    for (const auto& [server, touches] : rec.accessed_rows()) {
      for (const auto& t : touches) {
        out << rec.query_id() << ',' << server << ',' << t.epoch_id << ',' << t.row_index << ','
            << t.column << '\n';
      }
    }
  }
}

void AccessLog::write_bytes_csv(std::ostream& out) const {
  out << "query_id,bytes_sent,bytes_received,wall_time_us\n";
  for (const auto& rec : records_) {
    out << rec.query_id() << ',' << rec.bytes_sent_to_server() << ','
        << rec.bytes_received_from_server() << ','
        << std::chrono::duration_cast<std::chrono::microseconds>(rec.wall_time()).count() << '\n';
  }
}

}  // namespace quest::server
