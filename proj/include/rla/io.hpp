// File formats: versioned JSON documents for architectures, automata, and
// words, with a shared universe block mapping process/channel names to ids.
// Actions are written textually, e.g. "c1 swap 1" or "c2 conn 1 c3".
#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rla/rldfa.hpp"

namespace rla {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Universe {
  std::vector<std::string> processes;
  std::vector<std::string> channels;

  static Universe defaults(int n, int k);
  ProcessId process(const std::string& name) const;
  ChannelId channel(const std::string& name) const;
  friend bool operator==(const Universe&, const Universe&) = default;
};

std::string action_to_string(const Universe& u, const Action& a);
Action parse_action(const Universe& u, const std::string& text);

std::string tca_to_string(const Universe& u, const Tca& t);
std::pair<Universe, Tca> tca_from_string(const std::string& text);

std::string word_to_string(const Universe& u, std::span<const Action> word);
std::pair<Universe, std::vector<Action>> word_from_string(const std::string& text);

std::string dfa_to_string(const Universe& u, const ExplicitRlDfa& dfa);
std::pair<Universe, std::shared_ptr<ExplicitRlDfa>> dfa_from_string(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Materializes an automaton into explicit transition triples by exhausting
// its reachable configurations. Fails when more than max_states control
// states are reached.
std::shared_ptr<ExplicitRlDfa> materialize(const RlDfa& dfa, std::size_t max_states = 20000);

}  // namespace rla
