// Reconfigurable asynchronous automata: per-process state machines that
// synchronize on channels by agreeing on a data value. Process state
// universes are intensional (a step function plus a listening function);
// they are never enumerated.
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rla/sync.hpp"

namespace rla {

template <class S>
struct RaaProcess {
  S initial;
  // Partial transition: nullopt means this process blocks the communication.
  std::function<std::optional<S>(const S&, const DataValue&, const Action&)> step;
  std::function<Bits(const S&)> listening;
  std::function<bool(const S&, const DataValue&)> accept;
};

template <class S>
struct Raa {
  std::vector<RaaProcess<S>> processes;
  // Canonical data for a step, built from the current global state; the
  // processes still validate it, so a bad proposal simply blocks.
  std::function<std::optional<DataValue>(const std::vector<S>&, const Action&)> propose;
  // Candidate data for acceptance (the data universe is too large to scan).
  std::function<std::optional<DataValue>(const std::vector<S>&)> accept_witness;

  std::vector<S> initial_global() const {
    std::vector<S> g;
    g.reserve(processes.size());
    for (const auto& p : processes) g.push_back(p.initial);
    return g;
  }
};

enum class RaaFailure { ChannelDead, Blocked, NoData };

template <class S>
struct RaaStepResult {
  std::optional<std::vector<S>> next;
  RaaFailure failure = RaaFailure::Blocked;
  Bits blockers;
};

// One communication: every process listening to the channel must have a
// transition on (data, action); everyone else keeps its state untouched.
template <class S>
RaaStepResult<S> raa_step(const Raa<S>& raa, const std::vector<S>& global,
                          const DataValue& data, const Action& action) {
  RaaStepResult<S> res;
  Bits listeners;
  for (std::size_t p = 0; p < raa.processes.size(); ++p)
    if (raa.processes[p].listening(global[p]).test(action.channel))
      listeners.set(static_cast<int>(p));
  if (listeners.none()) {
    res.failure = RaaFailure::ChannelDead;
    return res;
  }
  std::vector<S> next = global;
  Bits blockers;
  for (int p : listeners) {
    auto stepped = raa.processes[p].step(global[p], data, action);
    if (!stepped) {
      blockers.set(p);
      continue;
    }
    next[p] = std::move(*stepped);
  }
  if (blockers.any()) {
    res.failure = RaaFailure::Blocked;
    res.blockers = blockers;
    return res;
  }
  res.next = std::move(next);
  return res;
}

template <class S>
struct RaaRun {
  std::vector<std::vector<S>> globals;  // globals[i] holds before step i
  std::vector<DataValue> data;          // data used at each completed step
  std::optional<std::size_t> undefined_at;
  RaaFailure failure = RaaFailure::Blocked;
  Bits blockers;

  bool defined() const { return !undefined_at.has_value(); }
  const std::vector<S>& final_global() const { return globals.back(); }
};

template <class S>
RaaRun<S> raa_run_with_data(const Raa<S>& raa,
                            std::span<const std::pair<DataValue, Action>> word) {
  RaaRun<S> rr;
  rr.globals.push_back(raa.initial_global());
  for (std::size_t i = 0; i < word.size(); ++i) {
    auto step = raa_step(raa, rr.globals.back(), word[i].first, word[i].second);
    if (!step.next) {
      rr.undefined_at = i;
      rr.failure = step.failure;
      rr.blockers = step.blockers;
      return rr;
    }
    rr.data.push_back(word[i].first);
    rr.globals.push_back(std::move(*step.next));
  }
  return rr;
}

// Runs a plain action word, proposing the data for each step.
template <class S>
RaaRun<S> raa_run(const Raa<S>& raa, std::span<const Action> word) {
  RaaRun<S> rr;
  rr.globals.push_back(raa.initial_global());
  for (std::size_t i = 0; i < word.size(); ++i) {
    auto data = raa.propose(rr.globals.back(), word[i]);
    if (!data) {
      rr.undefined_at = i;
      rr.failure = RaaFailure::NoData;
      return rr;
    }
    auto step = raa_step(raa, rr.globals.back(), *data, word[i]);
    if (!step.next) {
      rr.undefined_at = i;
      rr.failure = step.failure;
      rr.blockers = step.blockers;
      return rr;
    }
    rr.data.push_back(std::move(*data));
    rr.globals.push_back(std::move(*step.next));
  }
  return rr;
}

// A global state is accepting when some data value satisfies every process;
// returns that witness.
template <class S>
std::optional<DataValue> raa_accepts(const Raa<S>& raa, const std::vector<S>& global) {
  auto witness = raa.accept_witness(global);
  if (!witness) return std::nullopt;
  for (std::size_t p = 0; p < raa.processes.size(); ++p)
    if (!raa.processes[p].accept(global[p], *witness)) return std::nullopt;
  return witness;
}

template <class S>
bool raa_accepts_word(const Raa<S>& raa, std::span<const Action> word) {
  const RaaRun<S> rr = raa_run(raa, word);
  return rr.defined() && raa_accepts(raa, rr.final_global()).has_value();
}

}  // namespace rla
