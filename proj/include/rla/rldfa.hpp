// Deterministic automata over the reconfiguration alphabet. A configuration
// pairs a control state with the current architecture; transitions are taken
// only when the carried operation is possible. State spaces are addressed
// through an interface because the interesting automata (architecture
// trackers) have far too many states to enumerate up front.
#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rla/reconfig.hpp"
#include "rla/topology.hpp"

namespace rla {

using StateId = std::int64_t;

class RlDfa {
 public:
  virtual ~RlDfa() = default;

  virtual StateId initial() const = 0;
  virtual const Tca& arch0() const = 0;
  virtual std::optional<StateId> delta(StateId s, const Action& a) const = 0;
  virtual bool accepting(StateId s) const = 0;

  // Actions on which delta is defined at s. Whether they are possible from a
  // given architecture is a separate question.
  virtual std::vector<Action> delta_actions(StateId s) const = 0;

  // All architectures A such that the configuration (s, A) is reachable.
  virtual std::vector<Tca> state_archs(StateId s) const = 0;

  // Upper bound on the number of states, for size accounting.
  virtual std::uint64_t state_bound() const = 0;

  virtual std::string state_name(StateId s) const { return "s" + std::to_string(s); }

  int process_count() const { return arch0().process_count(); }
  int channel_count() const { return arch0().channel_count(); }
};

struct Config {
  StateId state = 0;
  Tca tca;
  friend bool operator==(const Config&, const Config&) = default;
};

struct ConfigHash {
  std::size_t operator()(const Config& c) const {
    return hash_mix(static_cast<std::size_t>(c.state), TcaHash{}(c.tca));
  }
};

enum class RunFailure { MissingTransition, InvalidOperation };

struct RunResult {
  std::vector<Config> configs;  // configs[i] holds before word[i]; size = steps + 1
  std::optional<std::size_t> undefined_at;
  RunFailure failure = RunFailure::MissingTransition;

  bool defined() const { return !undefined_at.has_value(); }
  const Config& final_config() const { return configs.back(); }
};

// One transition at the configuration level: the operation must be possible
// from cfg.tca and delta must be defined. Reports which requirement failed.
std::optional<Config> step_config(const RlDfa& dfa, const Config& cfg, const Action& a,
                                  RunFailure* failure = nullptr);

RunResult run(const RlDfa& dfa, std::span<const Action> word);
bool accepts(const RlDfa& dfa, std::span<const Action> word);

// Architecture-level independence: no process listens to both channels,
// before or after the respective operations. Both actions must be possible
// from tca (std::invalid_argument otherwise).
bool independent(const Tca& tca, const Action& a1, const Action& a2);

struct DiamondCounterexample {
  Config config;
  Action first, second;
  std::string detail;
};

// Exhaustively enumerates reachable configurations and checks that every
// independent pair of possible actions commutes, including definedness.
// Throws std::runtime_error if the configuration count exceeds max_configs.
std::optional<DiamondCounterexample> check_diamond(const RlDfa& dfa,
                                                   std::uint64_t max_configs = 8'000'000);

// Most recent state deducible by the process set X from the communications
// it transitively took part in. The word's run must be defined.
StateId view(const RlDfa& dfa, std::span<const Action> word, Bits procs);
// View of {p, parent of p} at the last step both took part in; the parent is
// the one p had at that step.
StateId parent_view(const RlDfa& dfa, std::span<const Action> word, ProcessId p);

// Trace-based variants for callers that already ran the word; upto limits
// the prefix considered.
StateId trace_view(const RlDfa& dfa, const RunResult& rr, std::span<const Action> word,
                   Bits procs, std::size_t upto);
StateId trace_parent_view(const RlDfa& dfa, const RunResult& rr,
                          std::span<const Action> word, ProcessId p, std::size_t upto);

// Exhaustive reachable-configuration index for small automata.
class ConfigSpace {
 public:
  ConfigSpace(const RlDfa& dfa, std::uint64_t max_configs = 8'000'000);
  const std::vector<Config>& configs() const { return configs_; }
  std::vector<Tca> archs_of(StateId s) const;

 private:
  std::vector<Config> configs_;
  std::unordered_map<StateId, std::vector<std::size_t>> by_state_;
};

// Finite automaton given by explicit transition triples; absent triples are
// undefined transitions.
class ExplicitRlDfa final : public RlDfa {
 public:
  ExplicitRlDfa(std::vector<std::string> state_names, StateId initial,
                std::vector<StateId> accepting, Tca arch0);

  void add_transition(StateId from, const Action& a, StateId to);

  StateId initial() const override { return initial_; }
  const Tca& arch0() const override { return arch0_; }
  std::optional<StateId> delta(StateId s, const Action& a) const override;
  bool accepting(StateId s) const override { return accepting_[s] != 0; }
  std::vector<Action> delta_actions(StateId s) const override;
  std::vector<Tca> state_archs(StateId s) const override;
  std::uint64_t state_bound() const override { return names_.size(); }
  std::string state_name(StateId s) const override { return names_[s]; }

  int state_count() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& state_names() const { return names_; }
  StateId state_by_name(const std::string& name) const;
  const std::vector<std::vector<std::pair<Action, StateId>>>& transitions() const {
    return trans_;
  }
  bool nop_only() const;

 private:
  std::vector<std::string> names_;
  StateId initial_;
  std::vector<char> accepting_;
  Tca arch0_;
  std::vector<std::vector<std::pair<Action, StateId>>> trans_;
  mutable std::mutex mu_;
  mutable std::unique_ptr<ConfigSpace> space_;
};

// Automaton whose states are the reachable architectures themselves: delta
// applies the operation. States are interned on demand.
class TrackerDfa final : public RlDfa {
 public:
  explicit TrackerDfa(Tca arch0);

  StateId id_of(const Tca& t) const;
  Tca tca_of(StateId s) const;

  StateId initial() const override { return 0; }
  const Tca& arch0() const override { return arch0_; }
  std::optional<StateId> delta(StateId s, const Action& a) const override;
  bool accepting(StateId) const override { return true; }
  std::vector<Action> delta_actions(StateId s) const override;
  std::vector<Tca> state_archs(StateId s) const override { return {tca_of(s)}; }
  std::uint64_t state_bound() const override;
  std::string state_name(StateId s) const override { return "arch" + std::to_string(s); }

 private:
  Tca arch0_;
  mutable std::mutex mu_;
  mutable std::deque<Tca> tcas_;
  mutable std::unordered_map<Tca, StateId, TcaHash> ids_;
};

// Product of a tracker with per-channel counters. Counter updates depend on
// the channel alone, so the product stays diamond closed; a channel may
// optionally block at chosen counter values (only sound when no other
// channel shares its counter).
struct CounterSpec {
  std::vector<int> counter_of;   // channel -> counter index
  std::vector<int> modulus;      // per counter
  std::vector<Bits> forbidden;   // per channel: blocking counter values
  std::vector<char> accepting;   // per counter code

  int code_count() const;
  int code_bump(int code, int counter) const;
  int value_of(int code, int counter) const;
  static CounterSpec parity(int k);
};

class CounterDfa final : public RlDfa {
 public:
  CounterDfa(std::shared_ptr<TrackerDfa> tracker, CounterSpec spec);

  const TrackerDfa& tracker() const { return *tracker_; }
  const CounterSpec& spec() const { return spec_; }
  StateId compose(StateId tracker_state, int code) const;
  StateId tracker_part(StateId s) const { return s / spec_.code_count(); }
  int code_part(StateId s) const { return static_cast<int>(s % spec_.code_count()); }

  StateId initial() const override { return 0; }
  const Tca& arch0() const override { return tracker_->arch0(); }
  std::optional<StateId> delta(StateId s, const Action& a) const override;
  bool accepting(StateId s) const override;
  std::vector<Action> delta_actions(StateId s) const override;
  std::vector<Tca> state_archs(StateId s) const override;
  std::uint64_t state_bound() const override;
  std::string state_name(StateId s) const override;

 private:
  std::shared_ptr<TrackerDfa> tracker_;
  CounterSpec spec_;
};

}  // namespace rla
