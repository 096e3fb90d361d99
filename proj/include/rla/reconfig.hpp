// Reconfiguration operations over tree-like communication architectures:
// validity checking, application, and a universality planner.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rla/topology.hpp"

namespace rla {

enum class OpKind : std::uint8_t { Nop, Swap, Move, Connect, Disconnect };

struct Op {
  OpKind kind = OpKind::Nop;
  EdgeLabel edge = 0;      // subject of swap/move/connect/disconnect
  EdgeLabel target = 0;    // move destination
  ChannelId channel = -1;  // channel joined by connect

  static Op nop() { return {}; }
  static Op swap(EdgeLabel e) { return {OpKind::Swap, e, 0, -1}; }
  static Op move(EdgeLabel e, EdgeLabel to) { return {OpKind::Move, e, to, -1}; }
  static Op connect(EdgeLabel e, ChannelId c) { return {OpKind::Connect, e, 0, c}; }
  static Op disconnect(EdgeLabel e) { return {OpKind::Disconnect, e, 0, -1}; }

  friend bool operator==(const Op&, const Op&) = default;
};

// One letter of the reconfiguration alphabet: a communication channel plus
// the operation it carries.
struct Action {
  ChannelId channel = -1;
  Op op;
  friend bool operator==(const Action&, const Action&) = default;
};

struct ActionHash {
  std::size_t operator()(const Action& a) const {
    std::size_t h = hash_mix(static_cast<std::size_t>(a.channel),
                             static_cast<std::size_t>(a.op.kind));
    h = hash_mix(h, static_cast<std::size_t>(a.op.edge));
    h = hash_mix(h, static_cast<std::size_t>(a.op.target + 1));
    return hash_mix(h, static_cast<std::size_t>(a.op.channel + 1));
  }
};

// nullopt when the action is possible from tca; otherwise the violated
// side condition. Throws std::invalid_argument when the action references
// channels outside the universe.
std::optional<std::string> check_valid(const Tca& tca, const Action& a);

// Applies a valid action; throws std::invalid_argument carrying the
// check_valid reason otherwise.
Tca apply(const Tca& tca, const Action& a);

// A sequence of actions whose replay via apply turns `from` into exactly
// `to`, every intermediate step valid. Both must be valid TCAs over the
// same universes (throws std::invalid_argument otherwise). No optimality is
// attempted; all internal choices break ties by ascending edge label and
// channel id, so plans are deterministic.
std::vector<Action> plan(const Tca& from, const Tca& to);

// Every syntactically well-formed operation / action over n processes and
// k channels, in a fixed deterministic order.
std::vector<Op> all_ops(int n, int k);
std::vector<Action> all_actions(int n, int k);

}  // namespace rla
