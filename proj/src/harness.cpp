#include "rla/harness.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace rla {

namespace {

constexpr std::uint64_t kMix = 0x9e3779b97f4a7c15ULL;

std::string fmt_action(const Action& a) {
  std::string s = "ch" + std::to_string(a.channel) + " ";
  switch (a.op.kind) {
    case OpKind::Nop: return s + "nop";
    case OpKind::Swap: return s + "swap " + std::to_string(a.op.edge);
    case OpKind::Move:
      return s + "move " + std::to_string(a.op.edge) + " " + std::to_string(a.op.target);
    case OpKind::Connect:
      return s + "conn " + std::to_string(a.op.edge) + " ch" + std::to_string(a.op.channel);
    case OpKind::Disconnect: return s + "disc " + std::to_string(a.op.edge);
  }
  return s + "?";
}

}  // namespace

Tca gen_tca(int n, int k, std::uint64_t seed) {
  if (n < 2 || n > 32 || k < 1 || k > 32)
    throw std::invalid_argument("gen_tca: need 2..32 processes and 1..32 channels");
  std::mt19937_64 rng(seed * kMix + 0x7ca5eedULL);
  auto pick = [&](std::size_t m) { return static_cast<int>(rng() % m); };

  // Uniform labeled tree from a random Pruefer sequence.
  std::vector<std::pair<int, int>> edges;
  if (n == 2) {
    edges.emplace_back(0, 1);
  } else {
    std::vector<int> seq(n - 2);
    for (int& x : seq) x = pick(n);
    std::vector<int> deg(n, 1);
    for (int x : seq) ++deg[x];
    Bits leaves;
    for (int i = 0; i < n; ++i)
      if (deg[i] == 1) leaves.set(i);
    for (int x : seq) {
      const int l = leaves.lowest();
      leaves.reset(l);
      edges.emplace_back(l, x);
      if (--deg[x] == 1) leaves.set(x);
    }
    const int a = leaves.lowest();
    leaves.reset(a);
    edges.emplace_back(a, leaves.lowest());
  }

  const int root = pick(n);
  std::vector<ProcessId> parent(n, -1);
  std::vector<char> placed(n, 0);
  placed[root] = 1;
  for (int round = 0; round < n; ++round)
    for (const auto& [u, v] : edges) {
      if (placed[u] && !placed[v]) {
        parent[v] = u;
        placed[v] = 1;
      } else if (placed[v] && !placed[u]) {
        parent[u] = v;
        placed[u] = 1;
      }
    }

  std::vector<EdgeLabel> labs;
  for (EdgeLabel e = 1; e < n; ++e) labs.push_back(e);
  for (int i = n - 2; i > 0; --i) std::swap(labs[i], labs[pick(i + 1)]);
  std::vector<EdgeLabel> label(n, 0);
  int at = 0;
  for (ProcessId p = 0; p < n; ++p)
    if (p != root) label[p] = labs[at++];
  Tree tree(std::move(parent), std::move(label));

  CommArch arch;
  arch.members.resize(k);
  for (ChannelId c = 0; c < k; ++c) {
    const ProcessId p = tree.proc_from_label(1 + pick(n - 1));
    Bits mem = Bits::single(p) | Bits::single(tree.parent(p));
    while (mem.count() < n && pick(2) == 0) {
      std::vector<ProcessId> frontier;
      for (ProcessId q = 0; q < n; ++q)
        if (!mem.test(q) && (tree.neighbors(q) & mem).any()) frontier.push_back(q);
      if (frontier.empty()) break;
      mem.set(frontier[pick(frontier.size())]);
    }
    arch.members[c] = mem;
  }

  // Repair: cover every uncovered edge by extending a random channel along
  // the paths to the root, which keeps its member set connected.
  for (EdgeLabel e = 1; e < n; ++e) {
    const ProcessId p = tree.proc_from_label(e);
    const ProcessId q = tree.parent(p);
    bool covered = false;
    for (ChannelId c = 0; c < k && !covered; ++c)
      covered = arch.members[c].test(p) && arch.members[c].test(q);
    if (covered) continue;
    Bits& mem = arch.members[pick(k)];
    for (ProcessId x = mem.lowest(); x != -1; x = tree.parent(x)) mem.set(x);
    for (ProcessId x = p; x != -1; x = tree.parent(x)) mem.set(x);
  }
  assert(validate_tca(arch, tree).ok());
  return {std::move(arch), std::move(tree)};
}

std::shared_ptr<RlDfa> gen_dfa(const GenSpec& spec) {
  const Tca arch0 = gen_tca(spec.n, spec.k, spec.seed);
  auto tracker = std::make_shared<TrackerDfa>(arch0);
  switch (spec.family) {
    case GenSpec::Family::Tracker:
      return tracker;
    case GenSpec::Family::TrackerParity:
      return std::make_shared<CounterDfa>(tracker, CounterSpec::parity(spec.k));
    case GenSpec::Family::TrackerCustom: {
      std::mt19937_64 rng(spec.seed * kMix + 0xc0117e5ULL);
      auto pick = [&](std::size_t m) { return static_cast<int>(rng() % m); };
      CounterSpec cs;
      const int counters = 1 + pick(spec.k);
      cs.modulus.resize(counters);
      for (int& m : cs.modulus) m = 2 + pick(3);
      cs.counter_of.resize(spec.k);
      for (int c = 0; c < spec.k; ++c) cs.counter_of[c] = pick(counters);
      cs.forbidden.assign(spec.k, Bits{});
      for (int c = 0; c < spec.k; ++c) {
        int sharers = 0;
        for (int c2 = 0; c2 < spec.k; ++c2)
          if (cs.counter_of[c2] == cs.counter_of[c]) ++sharers;
        if (sharers == 1 && pick(3) == 0)
          cs.forbidden[c].set(pick(cs.modulus[cs.counter_of[c]]));
      }
      const int codes = cs.code_count();
      cs.accepting.assign(codes, 0);
      for (int code = 0; code < codes; ++code) cs.accepting[code] = pick(2) ? 1 : 0;
      cs.accepting[pick(codes)] = 1;
      return std::make_shared<CounterDfa>(tracker, std::move(cs));
    }
  }
  throw std::logic_error("gen_dfa: unknown family");
}

void for_each_defined_word(
    const RlDfa& dfa, int max_len,
    const std::function<bool(std::span<const Action>, const Config&)>& visit) {
  std::vector<Action> word;
  bool stop = false;
  std::function<void(const Config&, int)> rec = [&](const Config& cfg, int depth) {
    if (stop) return;
    if (!visit(word, cfg)) {
      stop = true;
      return;
    }
    if (depth == max_len) return;
    for (const Action& a : dfa.delta_actions(cfg.state)) {
      if (check_valid(cfg.tca, a)) continue;
      auto next = step_config(dfa, cfg, a);
      assert(next);
      word.push_back(a);
      rec(*next, depth + 1);
      word.pop_back();
      if (stop) return;
    }
  };
  rec({dfa.initial(), dfa.arch0()}, 0);
}

std::vector<GeneratedWord> gen_words(const RlDfa& dfa, int count, int max_len,
                                     std::uint64_t seed, int undefined_percent) {
  std::mt19937_64 rng(seed * kMix + 0x30c2d5ULL);
  auto pick = [&](std::size_t m) { return static_cast<std::size_t>(rng() % m); };

  std::vector<GeneratedWord> out;
  bool complete = true;
  for_each_defined_word(dfa, max_len, [&](std::span<const Action> w, const Config&) {
    if (static_cast<int>(out.size()) >= count) {
      complete = false;
      return false;
    }
    out.push_back({std::vector<Action>(w.begin(), w.end()), std::nullopt});
    return true;
  });
  if (!complete) {
    out.clear();
    while (static_cast<int>(out.size()) < count) {
      GeneratedWord w;
      Config cfg{dfa.initial(), dfa.arch0()};
      const std::size_t len = pick(static_cast<std::size_t>(max_len) + 1);
      for (std::size_t j = 0; j < len; ++j) {
        std::vector<Action> valids;
        for (const Action& a : dfa.delta_actions(cfg.state))
          if (!check_valid(cfg.tca, a)) valids.push_back(a);
        if (valids.empty()) break;
        const Action a = valids[pick(valids.size())];
        cfg = *step_config(dfa, cfg, a);
        w.actions.push_back(a);
      }
      out.push_back(std::move(w));
    }
  }

  // Make a fraction of the words fail at a known index.
  const auto universe = all_actions(dfa.process_count(), dfa.channel_count());
  for (GeneratedWord& w : out) {
    if (static_cast<int>(pick(100)) >= undefined_percent) continue;
    const std::size_t cut = w.actions.empty() ? 0 : pick(w.actions.size() + 1);
    w.actions.resize(cut);
    Config cfg{dfa.initial(), dfa.arch0()};
    for (const Action& a : w.actions) cfg = *step_config(dfa, cfg, a);
    const std::size_t start = pick(universe.size());
    std::optional<Action> bad;
    for (std::size_t t = 0; t < universe.size() && !bad; ++t) {
      const Action& a = universe[(start + t) % universe.size()];
      if (!step_config(dfa, cfg, a)) bad = a;
    }
    if (!bad) continue;  // every action defined here; keep the word as is
    w.actions.push_back(*bad);
    w.expected_undefined = cut;
  }
  return out;
}

Bits expected_cc(const Tca& tca, ProcessId p, EdgeLabel e) {
  const Tree& t = tca.tree;
  ProcessId q;
  if (e != 0 && e == t.label(p)) q = t.parent(p);
  else if (t.child_labels(p).test(e)) q = t.proc_from_label(e);
  else return {};
  Bits out;
  for (ChannelId c = 0; c < tca.channel_count(); ++c)
    if (tca.arch.members[c].test(p) && tca.arch.members[c].test(q)) out.set(c);
  return out;
}

Bits expected_dc(const Tca& tca, ProcessId p, EdgeLabel e) {
  const Tree& t = tca.tree;
  Bits component;
  if (e != 0 && e == t.label(p)) component = Bits::below(t.size()) - t.below(e);
  else if (t.child_labels(p).test(e)) component = t.below(e);
  else return {};
  Bits out;
  for (ChannelId c = 0; c < tca.channel_count(); ++c)
    if (!tca.arch.members[c].test(p) && tca.arch.members[c].subset_of(component))
      out.set(c);
  return out;
}

namespace {

struct Auditor {
  const Distributed& dist;
  const RlDfa& dfa;
  std::span<const Action> word;
  LockstepResult& res;
  RunResult rr;

  bool check(std::size_t step, bool cond, const char* inv, const std::string& detail) {
    if (cond) return true;
    res.ok = false;
    res.failure = "step=" + std::to_string(step) + " invariant=" + std::string(inv) +
                  (detail.empty() ? "" : " (" + detail + ")");
    res.lines.push_back("audit step=" + std::to_string(step) + " fail " + inv);
    return false;
  }

  bool audit(std::size_t step, const std::vector<LocalState>& locals) {
    const Config& cfg = rr.configs[step];
    const int n = dfa.process_count();
    const int k = dfa.channel_count();

    for (ChannelId c = 0; c < k; ++c) {
      Bits actual;
      for (int p = 0; p < n; ++p)
        if (locals[p].listens.test(c)) actual.set(p);
      if (!check(step, actual == cfg.tca.arch.members[c], "I_CA",
                 "channel " + std::to_string(c)))
        return false;
    }

    std::vector<Neighborhood> family;
    family.reserve(n);
    for (int p = 0; p < n; ++p) family.push_back(neighborhood_of(locals[p]));
    const auto tree = make_tree(family);
    if (!check(step, tree.has_value() && *tree == cfg.tca.tree, "I_tree", "")) return false;

    for (int p = 0; p < n; ++p)
      for (EdgeLabel e = 0; e < n; ++e) {
        if (!check(step, locals[p].cc[e] == expected_cc(cfg.tca, p, e), "I_cc",
                   "process " + std::to_string(p) + " edge " + std::to_string(e)))
          return false;
        if (!check(step, locals[p].dc[e] == expected_dc(cfg.tca, p, e), "I_dc",
                   "process " + std::to_string(p) + " edge " + std::to_string(e)))
          return false;
      }

    for (int p = 0; p < n; ++p) {
      if (!check(step, locals[p].s2 == trace_view(dfa, rr, word, Bits::single(p), step),
                 "I_state", "process " + std::to_string(p)))
        return false;
      if (!check(step, locals[p].s1 == trace_parent_view(dfa, rr, word, p, step),
                 "I_stateparent", "process " + std::to_string(p)))
        return false;
    }

    // Per-channel recombination against the view oracle.
    for (ChannelId c = 0; c < k; ++c) {
      const SyncData sync = build_sync(locals, c);
      const StateId via_sync = state_from_sync(*dist.solver, sync);
      const StateId via_view =
          trace_view(dfa, rr, word, cfg.tca.arch.members[c], step);
      if (!check(step, via_sync == via_view, "sync-view", "channel " + std::to_string(c)))
        return false;
    }

    // Full-tree recombination computed from oracle labels alone.
    {
      LabeledTree lt;
      lt.shape = *make_subtree(neighborhoods(cfg.tca.tree));
      lt.labels.resize(n);
      for (int p = 0; p < n; ++p) {
        const EdgeLabel pe = cfg.tca.tree.label(p);
        lt.labels[p] = {trace_parent_view(dfa, rr, word, p, step),
                        trace_view(dfa, rr, word, Bits::single(p), step),
                        pe == 0 ? Bits{}
                                : expected_dc(cfg.tca, cfg.tca.tree.parent(p), pe)};
      }
      if (!check(step, dist.solver->diamtree(lt) == cfg.state, "diamview", "")) return false;
    }

    const auto decoded = decode_global(*dist.solver, locals);
    if (!check(step, decoded.has_value() && *decoded == cfg.state, "D", "")) return false;

    const bool central_accepts = dfa.accepting(cfg.state);
    const bool dist_accepts = raa_accepts(dist.raa, locals).has_value();
    if (!check(step, central_accepts == dist_accepts, "acceptance", "")) return false;

    res.lines.push_back("audit step=" + std::to_string(step) + " ok");
    return true;
  }
};

}  // namespace

LockstepResult lockstep(const Distributed& dist, std::span<const Action> word) {
  LockstepResult res;
  const RlDfa& dfa = *dist.dfa;
  Auditor aud{dist, dfa, word, res, {}};
  aud.rr.configs.push_back({dfa.initial(), dfa.arch0()});
  std::vector<LocalState> locals = dist.raa.initial_global();

  try {
    if (!aud.audit(0, locals)) return res;
    for (std::size_t i = 0; i < word.size(); ++i) {
      auto cnext = step_config(dfa, aud.rr.configs.back(), word[i]);
      auto data = propose_data(locals, word[i]);
      std::optional<std::vector<LocalState>> dnext;
      if (data) {
        auto stepped = raa_step(dist.raa, locals, *data, word[i]);
        if (stepped.next) dnext = std::move(stepped.next);
      }
      if (!cnext) res.central_undefined = i;
      if (!dnext) res.distributed_undefined = i;
      if (!aud.check(i, cnext.has_value() == dnext.has_value(), "I_def",
                     fmt_action(word[i]) +
                         (cnext ? ": distributed blocks a possible step"
                                : ": distributed steps where the run is undefined")))
        return res;
      if (!cnext) {
        res.lines.push_back("undefined step=" + std::to_string(i) + " both sides");
        res.steps_run = i;
        return res;
      }
      aud.rr.configs.push_back(std::move(*cnext));
      locals = std::move(*dnext);
      res.steps_run = i + 1;
      if (!aud.audit(i + 1, locals)) return res;
    }
  } catch (const std::exception& e) {
    res.ok = false;
    res.failure = std::string("exception: ") + e.what();
    res.lines.push_back("audit exception");
  }
  return res;
}

bool languages_agree(const Distributed& dist, int max_len, std::string* why) {
  const RlDfa& dfa = *dist.dfa;

  struct Key {
    Config cfg;
    std::vector<LocalState> locals;
    bool operator==(const Key& o) const { return cfg == o.cfg && locals == o.locals; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = ConfigHash{}(k.cfg);
      for (const LocalState& l : k.locals) h = hash_mix(h, LocalStateHash{}(l));
      return h;
    }
  };
  std::unordered_map<Key, int, KeyHash> seen;  // deepest remaining depth explored

  const auto universe = all_actions(dfa.process_count(), dfa.channel_count());
  std::vector<Action> trail;
  auto describe = [&]() {
    std::string s = "after [";
    for (std::size_t i = 0; i < trail.size(); ++i)
      s += (i ? ", " : "") + fmt_action(trail[i]);
    return s + "]";
  };

  std::function<bool(const Config&, const std::vector<LocalState>&, int)> dfs =
      [&](const Config& cfg, const std::vector<LocalState>& locals, int left) -> bool {
    const bool central_accepts = dfa.accepting(cfg.state);
    const bool dist_accepts = raa_accepts(dist.raa, locals).has_value();
    if (central_accepts != dist_accepts) {
      if (why) *why = "acceptance differs " + describe();
      return false;
    }
    if (left == 0) return true;
    Key key{cfg, locals};
    auto it = seen.find(key);
    if (it != seen.end() && it->second >= left) return true;
    seen[key] = left;

    for (const Action& a : universe) {
      auto cnext = step_config(dfa, cfg, a);
      auto data = propose_data(locals, a);
      std::optional<std::vector<LocalState>> dnext;
      if (data) {
        auto stepped = raa_step(dist.raa, locals, *data, a);
        if (stepped.next) dnext = std::move(stepped.next);
      }
      if (cnext.has_value() != dnext.has_value()) {
        if (why)
          *why = "definedness differs on " + fmt_action(a) + " " + describe();
        return false;
      }
      if (!cnext) continue;
      trail.push_back(a);
      if (!dfs(*cnext, *dnext, left - 1)) return false;
      trail.pop_back();
    }
    return true;
  };
  return dfs({dfa.initial(), dfa.arch0()}, dist.raa.initial_global(), max_len);
}

}  // namespace rla
