#pragma once

#include <vector>

#include "quest/iquest/digest.hpp"
#include "quest/model.hpp"
#include "quest/server/wire.hpp"
#include "quest/sss/searchable.hpp"

namespace quest::iquest {

/// One server's view of one event.
struct SharedRow {
  sss::SssFragment a_smid;  // digest, searchable form
  sss::Share a_sid;         // digest value
  sss::Share a_su;          // uniqueness bit
  sss::SssFragment a_sml;   // location code, searchable form
  sss::Share a_sl;          // location code value
  EpochId a_delta = 0;      // cleartext

  friend bool operator==(const SharedRow&, const SharedRow&) = default;
};

/// Shares every event of a sealed epoch. Result[s][j] is server s+1's
/// fragment of row j. The uniqueness bit is 1 on a device's first event at
/// each location within the epoch.
std::vector<std::vector<SharedRow>> create_shares_epoch(const Epoch& epoch, const SystemConfig& cfg,
                                                        DeviceDigester& digester,
                                                        LocationRegistry& registry,
                                                        const sss::PrimeField& field,
                                                        sss::RandomSource& rng);

/// Column layout of one server's rows, as the server stores them.
server::ShareColumns to_columns(EpochId epoch_id, std::uint32_t server_index,
                                const std::vector<SharedRow>& rows);

}  // namespace quest::iquest
