#include "quest/server/cluster.hpp"

namespace quest::server {

IquestCluster::IquestCluster(const SystemConfig& cfg) {
  for (int i = 1; i <= cfg.server_count; ++i) {
    servers_.push_back(std::make_unique<IquestServer>(i, cfg.field_prime));
    channels_.push_back(std::make_unique<Channel>(*servers_.back()));
  }
}

IquestCluster::IquestCluster(std::vector<IquestServer> servers) {
  for (auto& s : servers) {
    servers_.push_back(std::make_unique<IquestServer>(std::move(s)));
    channels_.push_back(std::make_unique<Channel>(*servers_.back()));
  }
}

std::vector<Channel*> IquestCluster::channels() {
  std::vector<Channel*> out;
  for (auto& c : channels_) out.push_back(c.get());
  return out;
}

}  // namespace quest::server
