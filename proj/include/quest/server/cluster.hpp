#pragma once

#include <memory>
#include <vector>

#include "quest/model.hpp"
#include "quest/server/channel.hpp"
#include "quest/server/cquest_server.hpp"
#include "quest/server/iquest_server.hpp"

namespace quest::server {

/// One cQuest server plus the client's channel to it.
struct CquestCluster {
  CquestServer server;
  Channel channel{server};

  CquestCluster() = default;
  explicit CquestCluster(CquestServer s) : server(std::move(s)) {}
  CquestCluster(const CquestCluster&) = delete;
  CquestCluster& operator=(const CquestCluster&) = delete;
};

/// N iQuest servers (indexes 1..N) and a channel to each.
class IquestCluster {
 public:
  explicit IquestCluster(const SystemConfig& cfg);
  explicit IquestCluster(std::vector<IquestServer> servers);

  std::size_t size() const noexcept { return servers_.size(); }
  IquestServer& server(int index) { return *servers_.at(static_cast<std::size_t>(index - 1)); }
  Channel& channel(int index) { return *channels_.at(static_cast<std::size_t>(index - 1)); }
  std::vector<Channel*> channels();

 private:
  std::vector<std::unique_ptr<IquestServer>> servers_;
  std::vector<std::unique_ptr<Channel>> channels_;
};

}  // namespace quest::server
