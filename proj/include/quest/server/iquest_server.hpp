#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "quest/server/channel.hpp"
#include "quest/server/wire.hpp"
#include "quest/sss/field.hpp"

namespace quest::server {

/// One of the N non-communicating iQuest servers. Holds only its own
/// fragments and evaluates the fixed query programs over every row of the
/// requested epochs, in row order.
class IquestServer final : public Endpoint {
 public:
  IquestServer(int index, std::uint64_t prime);

  int server_index() const override { return index_; }
  Bytes handle(ByteView request, std::vector<RowTouch>& touches) override;

  /// Throws IngestionError for an already stored epoch and CrossServerError
  /// for fragments addressed to another server.
  std::uint64_t ingest(ShareColumns epoch);
  ProgramResponse evaluate(const ProgramRequest& request, std::vector<RowTouch>& touches) const;

  const ShareColumns* epoch(EpochId x) const;
  std::vector<EpochId> epochs() const;
  std::uint64_t stored_bytes() const noexcept { return stored_bytes_; }

  /// Test seam: overwrites every stored value of this server only.
  void poison_for_testing(std::uint64_t seed);

  void save(const std::filesystem::path& path) const;
  static IquestServer load(const std::filesystem::path& path);

 private:
  int index_;
  sss::PrimeField field_;
  std::map<EpochId, ShareColumns> epochs_;
  std::uint64_t stored_bytes_ = 0;
};

}  // namespace quest::server
