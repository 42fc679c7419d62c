#pragma once

#include <cstdint>
#include <vector>

#include "quest/bytes.hpp"
#include "quest/measurement.hpp"

namespace quest::server {

/// A simulated server: consumes one framed request, returns one framed
/// response, and reports the stored cells it touched.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual int server_index() const = 0;
  virtual Bytes handle(ByteView request, std::vector<RowTouch>& touches) = 0;
};

/// Client-side handle to one endpoint. Counts every byte in both
/// directions and forwards touches into the caller's MeasurementRecord.
class Channel {
 public:
  explicit Channel(Endpoint& endpoint) : endpoint_(&endpoint) {}

  /// Throws ServerUnavailable while offline.
  Bytes call(ByteView request, MeasurementRecord* record = nullptr);

  int server_index() const { return endpoint_->server_index(); }
  void set_online(bool online) noexcept { online_ = online; }
  bool online() const noexcept { return online_; }

  std::uint64_t total_sent() const noexcept { return sent_; }
  std::uint64_t total_received() const noexcept { return received_; }

 private:
  Endpoint* endpoint_;
  bool online_ = true;
  std::uint64_t sent_ = 0;
  std::uint64_t received_ = 0;
};

}  // namespace quest::server
