#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "quest/cquest/cipher.hpp"
#include "quest/server/channel.hpp"
#include "quest/server/wire.hpp"

namespace quest::server {

/// The single untrusted cloud server of a cQuest deployment: an
/// append-only store of encrypted epochs with byte-equality indexes on
/// A_id, A_u and A_L.
class CquestServer final : public Endpoint {
 public:
  explicit CquestServer(int index = 1) : index_(index) {}

  int server_index() const override { return index_; }
  Bytes handle(ByteView request, std::vector<RowTouch>& touches) override;

  /// Deploys the outer key that enables expand_and_select.
  void set_outer_key(cquest::AttributeKey key);
  bool has_outer_key() const noexcept { return outer_.has_value(); }

  std::uint64_t ingest(CIngestRequest epoch);
  SelectResponse select_equal(const SelectRequest& request, std::vector<RowTouch>& touches) const;
  /// Throws CapabilityError without the outer key.
  SelectResponse expand_and_select(const ExpandRequest& request,
                                   std::vector<RowTouch>& touches) const;
  HtabResponse fetch_htab(const HtabRequest& request, std::vector<RowTouch>& touches) const;

  const cquest::EncryptedRow& row(EpochId epoch, std::uint32_t index) const;
  std::uint32_t row_count(EpochId epoch) const;
  std::vector<EpochId> epochs() const;
  std::uint64_t stored_bytes() const noexcept { return stored_bytes_; }

  void save(const std::filesystem::path& path) const;
  static CquestServer load(const std::filesystem::path& path);

 private:
  struct RowRef {
    EpochId epoch;
    std::uint32_t row;
  };
  struct StoredEpoch {
    std::vector<cquest::EncryptedRow> rows;
    Bytes htab_counts;
    Bytes htab_members;
  };

  static std::string key_of(ByteView b) { return std::string(b.begin(), b.end()); }
  SelectResponse collect(std::vector<RowRef> hits, CColumn searched,
                         const std::vector<CColumn>& project, std::vector<RowTouch>& touches) const;

  int index_;
  std::map<EpochId, StoredEpoch> epochs_;
  std::array<std::unordered_map<std::string, std::vector<RowRef>>, 3> indexes_;
  std::optional<cquest::AttributeKey> outer_key_;
  std::optional<cquest::DeterministicCipher> outer_;
  std::uint64_t stored_bytes_ = 0;
};

}  // namespace quest::server
