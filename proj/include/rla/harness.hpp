// Lockstep simulation of a centralized automaton against its distributed
// compilation, with per-step invariant audits, plus seeded instance and
// word generators used throughout the test suites.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rla/distribution.hpp"

namespace rla {

struct GenSpec {
  int n = 3;
  int k = 2;
  std::uint64_t seed = 0;
  enum class Family { Tracker, TrackerParity, TrackerCustom } family = Family::TrackerParity;
  int max_len = 8;
};

// Seeded valid architecture: a uniform labeled tree plus channel member
// sets grown around random edges and repaired to cover every edge.
Tca gen_tca(int n, int k, std::uint64_t seed);

std::shared_ptr<RlDfa> gen_dfa(const GenSpec& spec);

struct GeneratedWord {
  std::vector<Action> actions;
  std::optional<std::size_t> expected_undefined;
};

// Words with defined runs, salted with a fraction of words that fail at a
// known index. Exhaustive when the full tree up to max_len is smaller than
// the requested count, seeded-random otherwise.
std::vector<GeneratedWord> gen_words(const RlDfa& dfa, int count, int max_len,
                                     std::uint64_t seed, int undefined_percent = 25);

// Depth-first enumeration of all words with defined runs, shortest first
// along each branch; stops early when visit returns false.
void for_each_defined_word(
    const RlDfa& dfa, int max_len,
    const std::function<bool(std::span<const Action>, const Config&)>& visit);

// Reference values for the per-direction channel maps, recomputed from the
// centralized architecture.
Bits expected_cc(const Tca& tca, ProcessId p, EdgeLabel e);
Bits expected_dc(const Tca& tca, ProcessId p, EdgeLabel e);

struct LockstepResult {
  bool ok = true;
  std::string failure;             // first failing invariant, empty when ok
  std::vector<std::string> lines;  // stable per-step report lines
  std::optional<std::size_t> central_undefined;
  std::optional<std::size_t> distributed_undefined;
  std::size_t steps_run = 0;
};

// Advances both sides action by action and audits, after every prefix:
// matching definedness, both state components against the view oracles, the
// architecture against the collected listening sets and neighborhoods, the
// cc/dc maps, sync recombination against views, global decoding, and
// acceptance agreement.
LockstepResult lockstep(const Distributed& dist, std::span<const Action> word);

// Joint memoized exploration of every word up to max_len: definedness and
// acceptance must agree between the automaton and its distribution at every
// node. Returns false and a description on the first disagreement.
bool languages_agree(const Distributed& dist, int max_len, std::string* why = nullptr);

}  // namespace rla
