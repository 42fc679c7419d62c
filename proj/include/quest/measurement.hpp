#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "quest/model.hpp"

namespace quest {

/// One stored cell touched by a server while answering a query.
struct RowTouch {
  EpochId epoch_id = 0;
  std::uint32_t row_index = 0;
  std::string column;

  friend bool operator==(const RowTouch&, const RowTouch&) = default;
};

/// Per-query account of what the servers touched and how many bytes crossed
/// the client/server boundary. Mutable while the query runs, frozen by
/// seal().
class MeasurementRecord {
 public:
  MeasurementRecord() = default;
  explicit MeasurementRecord(std::string query_id) : query_id_(std::move(query_id)) {}

  const std::string& query_id() const noexcept { return query_id_; }

  void append_touches(int server, const std::vector<RowTouch>& touches);
  void add_bytes(std::uint64_t sent, std::uint64_t received);
  void set_wall_time(std::chrono::nanoseconds t);
  void seal() noexcept { sealed_ = true; }
  bool sealed() const noexcept { return sealed_; }

  const std::map<int, std::vector<RowTouch>>& accessed_rows() const noexcept {
    return accessed_rows_;
  }
  std::uint64_t bytes_sent_to_server() const noexcept { return bytes_sent_; }
  std::uint64_t bytes_received_from_server() const noexcept { return bytes_received_; }
  std::chrono::nanoseconds wall_time() const noexcept { return wall_time_; }

 private:
  void require_open() const;

  std::string query_id_;
  std::map<int, std::vector<RowTouch>> accessed_rows_;
  std::uint64_t bytes_sent_ = 0;
  std::uint64_t bytes_received_ = 0;
  std::chrono::nanoseconds wall_time_{0};
  bool sealed_ = false;
};

}  // namespace quest
