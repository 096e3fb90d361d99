// Synchronization data exchanged on every communication: one row per
// participant, carrying its state pair, its channel-restricted neighborhood,
// and the channel set hidden in its subtree.
#pragma once

#include <vector>

#include "rla/rldfa.hpp"
#include "rla/topology.hpp"

namespace rla {

struct SyncEntry {
  StateId s1 = 0;
  StateId s2 = 0;
  EdgeLabel pedge = 0;
  Bits cedges;    // children that share the communication channel
  Bits channels;  // channels located strictly inside this entry's subtree
  friend bool operator==(const SyncEntry&, const SyncEntry&) = default;
};

// Canonical order: ascending pedge.
using SyncData = std::vector<SyncEntry>;

enum class DataKind : std::uint8_t { Sync, SyncCD, SyncC, SyncE };

// Data content of one communication. Which extension fields are meaningful
// depends on the operation: swaps carry the channel sets C and D of the
// displaced parent edge, moves carry C (and D explicitly when the moved
// process is not part of the communication), connects carry the inviter's
// parent edge.
struct DataValue {
  DataKind kind = DataKind::Sync;
  SyncData sync;
  Bits cset;
  Bits dset;
  EdgeLabel edge = 0;

  static DataValue plain(SyncData s) { return {DataKind::Sync, std::move(s), {}, {}, 0}; }
  static DataValue with_cd(SyncData s, Bits c, Bits d) {
    return {DataKind::SyncCD, std::move(s), c, d, 0};
  }
  static DataValue with_c(SyncData s, Bits c) {
    return {DataKind::SyncC, std::move(s), c, {}, 0};
  }
  static DataValue with_edge(SyncData s, EdgeLabel e) {
    return {DataKind::SyncE, std::move(s), {}, {}, e};
  }

  friend bool operator==(const DataValue&, const DataValue&) = default;
};

inline std::vector<Neighborhood> sync_neighborhoods(const SyncData& sync) {
  std::vector<Neighborhood> out;
  out.reserve(sync.size());
  for (const SyncEntry& e : sync) out.push_back({e.pedge, e.cedges});
  return out;
}

}  // namespace rla
