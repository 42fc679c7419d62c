#include "quest/server/channel.hpp"

#include "quest/errors.hpp"

namespace quest::server {

Bytes Channel::call(ByteView request, MeasurementRecord* record) {
  if (!online_) {
    throw ServerUnavailable("server " + std::to_string(server_index()) + " is offline");
  }
  std::vector<RowTouch> touches;
  Bytes response = endpoint_->handle(request, touches);
  sent_ += request.size();
  received_ += response.size();
  if (record) {
    record->add_bytes(request.size(), response.size());
    record->append_touches(server_index(), touches);
  }
  return response;
}

}  // namespace quest::server
