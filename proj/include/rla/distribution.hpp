// Compilation of a diamond-closed automaton into a reconfigurable
// asynchronous automaton that distributes it. Every process keeps a pair of
// control states, its listening set, its tree neighborhood, and the two
// per-direction channel maps cc (shared with the neighbor) and dc (hidden
// behind the neighbor).
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "rla/diam.hpp"
#include "rla/raa.hpp"
#include "rla/sync.hpp"

namespace rla {

struct LocalState {
  StateId s1 = 0;  // state at the last communication shared with the parent
  StateId s2 = 0;  // newest state known here
  Bits listens;
  EdgeLabel pedge = 0;
  Bits cedges;
  std::vector<Bits> cc;  // edge label -> channels shared with that neighbor
  std::vector<Bits> dc;  // edge label -> channels hidden behind that neighbor
  friend bool operator==(const LocalState&, const LocalState&) = default;
};

struct LocalStateHash {
  std::size_t operator()(const LocalState& s) const;
};

LocalState initial_local_state(const RlDfa& dfa, ProcessId p);

// Canonical data for a communication on c: one row per listener, ascending
// pedge; each row's channel set is what the row's parent hides behind it.
SyncData build_sync(std::span<const LocalState> locals, ChannelId c);

// Whether a process in local state s agrees to sync data for channel c.
bool consistent(const SyncData& sync, const LocalState& s, ChannelId c);

// Newest control state derivable from agreed sync data (diamtree over the
// synchronized subtree). Throws std::invalid_argument on malformed data.
StateId state_from_sync(DiamSolver& solver, const SyncData& sync);

// One process's transition. nullopt means the process blocks; the violated
// clause is reported through why.
std::optional<LocalState> local_step(const RlDfa& dfa, DiamSolver& solver,
                                     const LocalState& s, const DataValue& d,
                                     const Action& a, std::string* why = nullptr);

// Canonical data proposal for a step, assembled from the current global
// state the same way the participants would. The processes still validate
// it, so proposals for impossible steps simply block.
std::optional<DataValue> propose_data(std::span<const LocalState> locals, const Action& a);

inline Neighborhood neighborhood_of(const LocalState& s) { return {s.pedge, s.cedges}; }

// Full-tree sync candidate with rows ordered by parent edge, or nullopt when
// the local states do not assemble into one.
std::optional<SyncData> global_sync_candidate(std::span<const LocalState> locals);

// Whether a full-tree sync is the one this process would vouch for: its own
// row matches, the channels attributed to each subtree agree with the dc
// maps on both sides of the edge, and the process accounts for exactly the
// channels it does not listen to.
bool globally_consistent(const SyncData& sync, const LocalState& s, int channel_count);

// The unique acceptance-data candidate, validated against every process.
std::optional<DataValue> accept_data(std::span<const LocalState> locals, int channel_count);

// Decodes the centralized state from a global state (candidate + diamtree).
std::optional<StateId> decode_global(DiamSolver& solver, std::span<const LocalState> locals);

// Bits of a canonical packed encoding of s.
std::size_t serialized_bit_size(const LocalState& s, std::uint64_t state_bound, int n,
                                int k);
// Worst-case encoding size for any local state of the same shape.
std::size_t local_state_bit_bound(std::uint64_t state_bound, int n, int k);

struct Distributed {
  std::shared_ptr<const RlDfa> dfa;
  std::shared_ptr<DiamSolver> solver;
  Raa<LocalState> raa;
};

// Builds the distributing automaton. Unless assume_diamond_closed is set,
// runs the exhaustive diamond check first and rejects with the
// counterexample on failure.
Distributed distribute(std::shared_ptr<const RlDfa> dfa, bool assume_diamond_closed = false);

// Fixed-architecture specialization: when the automaton only moves on nop
// letters the topology components never change, and each process keeps just
// the state pair.
struct PairState {
  StateId s1 = 0, s2 = 0;
  friend bool operator==(const PairState&, const PairState&) = default;
};

struct SpecializedRaa {
  std::shared_ptr<const RlDfa> dfa;
  std::shared_ptr<DiamSolver> solver;
  std::vector<LocalState> skeleton;  // frozen topology components per process
  Raa<PairState> raa;
};

SpecializedRaa specialize_fixed(std::shared_ptr<const RlDfa> dfa);

}  // namespace rla
