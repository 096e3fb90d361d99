// Recombination of states reached along independent words. diam answers
// "where does the automaton land after w1 then w2" from the last common
// state, the two one-sided results, and the channel set of one side;
// diamtree folds diam over a labeled subtree.
#pragma once

#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rla/rldfa.hpp"
#include "rla/topology.hpp"

namespace rla {

struct LabeledTree {
  struct Label {
    StateId s1 = 0;      // state shared with the parent side
    StateId s2 = 0;      // newest state known on this node's side
    Bits channels;       // channels inside this node's subtree
  };
  SubTree shape;
  std::vector<Label> labels;  // aligned with shape indices
};

class DiamSolver {
 public:
  struct Unrealizable : std::runtime_error {
    Unrealizable(StateId s, StateId s1, StateId s2, Bits c)
        : std::runtime_error("diam: no witness for query at state " + std::to_string(s) +
                             " (" + std::to_string(s1) + ", " + std::to_string(s2) +
                             ", " + c.to_string() + ")") {}
  };

  explicit DiamSolver(const RlDfa& dfa, std::uint64_t side_budget = 2'000'000);

  // s1 = state after one word, s2 = state after an independent word whose
  // channels lie in `channels`; returns the state after both. Searches for
  // witness words from a reachable configuration carrying s, so the query
  // must stem from an actual pair of independent continuations.
  StateId diam(StateId s, StateId s1, StateId s2, Bits channels);

  StateId diamtree(const LabeledTree& t);

  const RlDfa& dfa() const { return dfa_; }

 private:
  struct Key {
    StateId s, s1, s2;
    std::uint64_t channels;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = hash_mix(static_cast<std::size_t>(k.s), static_cast<std::size_t>(k.s1));
      h = hash_mix(h, static_cast<std::size_t>(k.s2));
      return hash_mix(h, k.channels);
    }
  };

  std::optional<StateId> search(StateId s, StateId s1, StateId s2, Bits channels) const;
  StateId peel(const LabeledTree& t, int node, std::size_t kid_from);

  const RlDfa& dfa_;
  std::uint64_t side_budget_;
  mutable std::shared_mutex mu_;
  std::unordered_map<Key, StateId, KeyHash> memo_;
};

}  // namespace rla
