#include "quest/epoch_builder.hpp"

#include "quest/errors.hpp"

namespace quest {

EpochBuilder::EpochBuilder(SystemConfig cfg, std::optional<TimestampMs> origin)
    : cfg_(std::move(cfg)), origin_(origin) {}

Epoch EpochBuilder::make_epoch(EpochId id) const {
  Epoch e;
  e.id = id;
  e.begin = *origin_ + id * cfg_.epoch_duration_ms();
  e.end = e.begin + cfg_.epoch_duration_ms();
  return e;
}

std::vector<Epoch> EpochBuilder::push(const ConnectivityEvent& event) {
  if (!origin_) origin_ = stream_origin(event.timestamp, cfg_);
  const EpochId id = assign_epoch(event, cfg_, *origin_);

  std::vector<Epoch> sealed;
  if (open_) {
    if (id == open_->id) {
      open_->events.push_back(event);
      return sealed;
    }
    if (id < open_->id) throw LateEvent("event for sealed epoch " + std::to_string(id));
    wall_clock_[open_->id] = open_->begin;
    sealed.push_back(std::move(*open_));
    open_.reset();
  } else if (id < next_id_) {
    throw LateEvent("event for sealed epoch " + std::to_string(id));
  }
  // Empty epochs in the gap still exist; tiling has no holes.
  for (EpochId gap = next_id_; gap < id; ++gap) {
    sealed.push_back(make_epoch(gap));
    wall_clock_[gap] = sealed.back().begin;
  }
  open_ = make_epoch(id);
  open_->events.push_back(event);
  next_id_ = id + 1;
  return sealed;
}

std::optional<Epoch> EpochBuilder::flush() {
  if (!open_) return std::nullopt;
  wall_clock_[open_->id] = open_->begin;
  std::optional<Epoch> out = std::move(open_);
  open_.reset();
  return out;
}

std::vector<Epoch> bucket_events(const std::vector<ConnectivityEvent>& events,
                                 const SystemConfig& cfg) {
  EpochBuilder builder(cfg);
  std::vector<Epoch> out;
  for (const auto& ev : events) {
    for (auto& e : builder.push(ev)) out.push_back(std::move(e));
  }
  if (auto last = builder.flush()) out.push_back(std::move(*last));
  return out;
}

}  // namespace quest
