#include "rla/diam.hpp"

#include <algorithm>
#include <cassert>

namespace rla {

namespace {

// BFS over configurations reachable from start via actions whose channel
// members all sit inside `side` at the moment of the step (and whose channel
// lies in `filter` when given). Returns the first word reaching a
// configuration with the target control state.
std::optional<std::vector<Action>> side_bfs(const RlDfa& dfa, const Config& start,
                                            Bits side, std::optional<Bits> filter,
                                            StateId target, std::uint64_t budget) {
  if (start.state == target) return std::vector<Action>{};

  std::vector<Config> configs{start};
  std::unordered_map<Config, std::size_t, ConfigHash> seen{{start, 0}};
  std::vector<std::pair<std::int64_t, Action>> back{{-1, Action{}}};

  for (std::size_t at = 0; at < configs.size(); ++at) {
    const Config cfg = configs[at];
    for (const Action& a : dfa.delta_actions(cfg.state)) {
      if (filter && !filter->test(a.channel)) continue;
      if (!cfg.tca.arch.members[a.channel].subset_of(side)) continue;
      if (check_valid(cfg.tca, a)) continue;
      const auto to = dfa.delta(cfg.state, a);
      assert(to);
      Config next{*to, apply(cfg.tca, a)};
      if (seen.contains(next)) continue;
      if (configs.size() >= budget) return std::nullopt;
      seen.emplace(next, configs.size());
      back.emplace_back(static_cast<std::int64_t>(at), a);
      configs.push_back(std::move(next));
      if (configs.back().state == target) {
        std::vector<Action> word;
        for (std::int64_t i = static_cast<std::int64_t>(configs.size()) - 1; i > 0;
             i = back[i].first)
          word.push_back(back[i].second);
        std::reverse(word.begin(), word.end());
        return word;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

DiamSolver::DiamSolver(const RlDfa& dfa, std::uint64_t side_budget)
    : dfa_(dfa), side_budget_(side_budget) {}

std::optional<StateId> DiamSolver::search(StateId s, StateId s1, StateId s2,
                                          Bits channels) const {
  for (const Tca& arch : dfa_.state_archs(s)) {
    const int n = arch.process_count();
    const Bits everyone = Bits::below(n);
    for (EdgeLabel e = 1; e < n; ++e) {
      const Bits lower = arch.tree.below(e);
      for (const Bits side2 : {lower, everyone - lower}) {
        bool inside = true;
        for (int c : channels)
          inside = inside && arch.arch.members[c].subset_of(side2);
        if (!inside) continue;

        const Config start{s, arch};
        const auto w2 = side_bfs(dfa_, start, side2, channels, s2, side_budget_);
        if (!w2) continue;
        const auto w1 =
            side_bfs(dfa_, start, everyone - side2, std::nullopt, s1, side_budget_);
        if (!w1) continue;

        // Replay the witness pair; the first word leads to s1, running the
        // second from there yields the recombined state.
        Config cfg = start;
        bool ok = true;
        for (const std::vector<Action>* w : {&*w1, &*w2}) {
          for (const Action& a : *w) {
            auto next = step_config(dfa_, cfg, a);
            if (!next) {
              ok = false;
              break;
            }
            cfg = std::move(*next);
          }
          if (!ok) break;
        }
        if (ok) return cfg.state;
      }
    }
  }
  return std::nullopt;
}

StateId DiamSolver::diam(StateId s, StateId s1, StateId s2, Bits channels) {
  // One empty side resolves the query without a search.
  if (s1 == s) return s2;
  if (s2 == s) return s1;

  const Key key{s, s1, s2, channels.raw()};
  {
    std::shared_lock lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const auto result = search(s, s1, s2, channels);
  if (!result) throw Unrealizable(s, s1, s2, channels);
  {
    std::unique_lock lock(mu_);
    memo_.emplace(key, *result);
  }
  return *result;
}

StateId DiamSolver::peel(const LabeledTree& t, int node, std::size_t kid_from) {
  const auto& kids = t.shape.kids[node];
  if (kid_from == kids.size()) return t.labels[node].s2;
  const int first = kids[kid_from];
  const StateId rest = peel(t, node, kid_from + 1);
  const StateId sub = peel(t, first, 0);
  return diam(t.labels[first].s1, rest, sub, t.labels[first].channels);
}

StateId DiamSolver::diamtree(const LabeledTree& t) {
  if (t.shape.size() == 0 || t.shape.root < 0)
    throw std::invalid_argument("diamtree: empty tree");
  if (t.labels.size() != static_cast<std::size_t>(t.shape.size()))
    throw std::invalid_argument("diamtree: label count mismatch");
  return peel(t, t.shape.root, 0);
}

}  // namespace rla
