#pragma once

#include <map>
#include <optional>
#include <vector>

#include "quest/model.hpp"

namespace quest {

/// Collector buffer: groups a chronological event stream into sealed,
/// gap-free epochs. Events keep their arrival order inside an epoch.
class EpochBuilder {
 public:
  explicit EpochBuilder(SystemConfig cfg, std::optional<TimestampMs> origin = std::nullopt);

  /// Accepts one event. Returns the epochs this event sealed (the open one
  /// plus any empty epochs skipped over), in id order. Throws LateEvent for
  /// an event whose epoch is already sealed.
  std::vector<Epoch> push(const ConnectivityEvent& event);

  /// Seals and returns the open epoch, if any.
  std::optional<Epoch> flush();

  std::optional<TimestampMs> origin() const noexcept { return origin_; }

  /// Epoch counter to wall-clock begin time, for every epoch sealed so far.
  const std::map<EpochId, TimestampMs>& wall_clock() const noexcept { return wall_clock_; }

 private:
  Epoch make_epoch(EpochId id) const;

  SystemConfig cfg_;
  std::optional<TimestampMs> origin_;
  std::optional<Epoch> open_;
  EpochId next_id_ = 0;
  std::map<EpochId, TimestampMs> wall_clock_;
};

/// Buckets a whole stream. Events must be chronological across epochs.
std::vector<Epoch> bucket_events(const std::vector<ConnectivityEvent>& events,
                                 const SystemConfig& cfg);

}  // namespace quest
