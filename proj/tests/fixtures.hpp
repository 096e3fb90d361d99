// Shared test instances. The five-process architecture with channels
// c1 = {p1,p2,p3}, c2 = {p1,p3,p4}, c3 = {p3,p5} over the tree
// p1 -(1)- p2, p1 -(2)- p3, p3 -(3)- p4, p3 -(4)- p5 recurs everywhere;
// process ids are zero-based, so p1 = 0 ... p5 = 4 and c1 = 0 ... c3 = 2.
#pragma once

#include <memory>

#include "rla/distribution.hpp"
#include "rla/raa.hpp"
#include "rla/rldfa.hpp"

namespace rla::fixtures {

inline Tca fig2() {
  Tree tree({-1, 0, 0, 2, 2}, {0, 1, 2, 3, 4});
  CommArch arch;
  arch.members = {Bits::of({0, 1, 2}), Bits::of({0, 2, 3}), Bits::of({2, 4})};
  return {std::move(arch), std::move(tree)};
}

// fig2 after "c1 conn 1 c2": p2 joins c2.
inline Tca fig3_left() {
  Tca t = fig2();
  t.arch.members[1] = Bits::of({0, 1, 2, 3});
  return t;
}

// fig2 after "c1 disc 2": p3 leaves c1.
inline Tca fig3_right() {
  Tca t = fig2();
  t.arch.members[0] = Bits::of({0, 1});
  return t;
}

// Automaton accepting exactly (c1,nop)(c2,nop) over a universe where c1 and
// c2 have no common member; the reverse order has no transition, so it is
// not diamond closed.
inline std::shared_ptr<ExplicitRlDfa> nonclosed_dfa() {
  Tree tree({-1, 0, 1, 2}, {0, 1, 2, 3});
  CommArch arch;
  arch.members = {Bits::of({0, 1}), Bits::of({2, 3}), Bits::of({1, 2})};
  auto dfa = std::make_shared<ExplicitRlDfa>(
      std::vector<std::string>{"x0", "x1", "x2"}, 0, std::vector<StateId>{2},
      Tca{std::move(arch), std::move(tree)});
  dfa->add_transition(0, {0, Op::nop()}, 1);
  dfa->add_transition(1, {1, Op::nop()}, 2);
  return dfa;
}

// Per-channel parity counters over a fixed architecture, moving only on nop
// letters; accepts when every counter is even.
inline std::shared_ptr<ExplicitRlDfa> nop_parity_dfa(const Tca& arch0) {
  const int k = arch0.channel_count();
  const int codes = 1 << k;
  std::vector<std::string> names;
  for (int code = 0; code < codes; ++code) names.push_back("q" + std::to_string(code));
  auto dfa = std::make_shared<ExplicitRlDfa>(std::move(names), 0, std::vector<StateId>{0},
                                             arch0);
  for (int code = 0; code < codes; ++code)
    for (ChannelId c = 0; c < k; ++c)
      dfa->add_transition(code, {c, Op::nop()}, code ^ (1 << c));
  return dfa;
}

// Three processes over channels a, b, c (= 0, 1, 2): the first two toggle on
// their own letter and refuse c while "odd"; the third always allows c.
// Acceptance is unconditional.
inline Raa<int> fig1_raa() {
  Raa<int> raa;
  auto toggler = [](ChannelId own) {
    RaaProcess<int> p;
    p.initial = 0;
    p.step = [own](const int& s, const DataValue&, const Action& a) -> std::optional<int> {
      if (a.channel == own) return 1 - s;
      return std::nullopt;  // listening to c while odd, but no transition
    };
    p.listening = [own](const int& s) {
      return s == 0 ? Bits::single(own) : Bits::single(own) | Bits::single(2);
    };
    p.accept = [](const int&, const DataValue&) { return true; };
    return p;
  };
  raa.processes.push_back(toggler(0));
  raa.processes.push_back(toggler(1));
  RaaProcess<int> always;
  always.initial = 0;
  always.step = [](const int& s, const DataValue&, const Action& a) -> std::optional<int> {
    if (a.channel == 2) return s;
    return std::nullopt;
  };
  always.listening = [](const int&) { return Bits::single(2); };
  always.accept = [](const int&, const DataValue&) { return true; };
  raa.processes.push_back(always);

  raa.propose = [](const std::vector<int>&, const Action&) {
    return DataValue::plain({});
  };
  raa.accept_witness = [](const std::vector<int>&) { return DataValue::plain({}); };
  return raa;
}

}  // namespace rla::fixtures
