#include "rla/rldfa.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace rla {

std::optional<Config> step_config(const RlDfa& dfa, const Config& cfg, const Action& a,
                                  RunFailure* failure) {
  if (check_valid(cfg.tca, a)) {
    if (failure) *failure = RunFailure::InvalidOperation;
    return std::nullopt;
  }
  const auto next = dfa.delta(cfg.state, a);
  if (!next) {
    if (failure) *failure = RunFailure::MissingTransition;
    return std::nullopt;
  }
  return Config{*next, apply(cfg.tca, a)};
}

RunResult run(const RlDfa& dfa, std::span<const Action> word) {
  RunResult rr;
  rr.configs.push_back({dfa.initial(), dfa.arch0()});
  for (std::size_t i = 0; i < word.size(); ++i) {
    RunFailure f;
    auto next = step_config(dfa, rr.configs.back(), word[i], &f);
    if (!next) {
      rr.undefined_at = i;
      rr.failure = f;
      return rr;
    }
    rr.configs.push_back(std::move(*next));
  }
  return rr;
}

bool accepts(const RlDfa& dfa, std::span<const Action> word) {
  const RunResult rr = run(dfa, word);
  return rr.defined() && dfa.accepting(rr.final_config().state);
}

bool independent(const Tca& tca, const Action& a1, const Action& a2) {
  if (auto why = check_valid(tca, a1))
    throw std::invalid_argument("independent: first action invalid: " + *why);
  if (auto why = check_valid(tca, a2))
    throw std::invalid_argument("independent: second action invalid: " + *why);
  const Bits m1 =
      tca.arch.members[a1.channel] | apply(tca, a1).arch.members[a1.channel];
  const Bits m2 =
      tca.arch.members[a2.channel] | apply(tca, a2).arch.members[a2.channel];
  return !m1.intersects(m2);
}

namespace {

// Interning BFS over reachable configurations.
struct ConfigBfs {
  std::vector<Config> configs;
  std::unordered_map<Config, std::size_t, ConfigHash> index;

  std::size_t intern(Config c, std::uint64_t budget) {
    auto it = index.find(c);
    if (it != index.end()) return it->second;
    if (configs.size() >= budget)
      throw std::runtime_error("reachable configuration budget exceeded");
    const std::size_t id = configs.size();
    index.emplace(c, id);
    configs.push_back(std::move(c));
    return id;
  }
};

}  // namespace

std::optional<DiamondCounterexample> check_diamond(const RlDfa& dfa,
                                                   std::uint64_t max_configs) {
  ConfigBfs bfs;
  bfs.intern({dfa.initial(), dfa.arch0()}, max_configs);

  std::vector<Action> acts;
  std::vector<Config> nexts;
  std::vector<Bits> premask;

  for (std::size_t at = 0; at < bfs.configs.size(); ++at) {
    const Config cfg = bfs.configs[at];  // copy: the vector grows below
    acts.clear();
    nexts.clear();
    premask.clear();
    for (const Action& a : dfa.delta_actions(cfg.state)) {
      if (check_valid(cfg.tca, a)) continue;
      const auto to = dfa.delta(cfg.state, a);
      assert(to);
      Config next{*to, apply(cfg.tca, a)};
      bfs.intern(next, max_configs);
      acts.push_back(a);
      nexts.push_back(std::move(next));
      premask.push_back(cfg.tca.arch.members[a.channel]);
    }

    for (std::size_t i = 0; i < acts.size(); ++i) {
      for (std::size_t j = i + 1; j < acts.size(); ++j) {
        // Valid operations never widen their own channel, so intersecting
        // member sets already decide dependence.
        if (premask[i].intersects(premask[j])) continue;
        if (!independent(cfg.tca, acts[i], acts[j])) continue;

        RunFailure f12, f21;
        const auto r12 = step_config(dfa, nexts[i], acts[j], &f12);
        const auto r21 = step_config(dfa, nexts[j], acts[i], &f21);
        if (r12.has_value() != r21.has_value()) {
          return DiamondCounterexample{cfg, acts[i], acts[j],
                                       r12 ? "second order undefined" : "first order undefined"};
        }
        if (r12 && r12->state != r21->state) {
          return DiamondCounterexample{cfg, acts[i], acts[j],
                                       "orders reach " + dfa.state_name(r12->state) +
                                           " vs " + dfa.state_name(r21->state)};
        }
      }
    }
  }
  return std::nullopt;
}

StateId trace_view(const RlDfa& dfa, const RunResult& rr, std::span<const Action> word,
                   Bits procs, std::size_t upto) {
  if (upto == 0) return dfa.initial();
  assert(upto < rr.configs.size());
  const Action& a = word[upto - 1];
  const Bits mem = rr.configs[upto - 1].tca.arch.members[a.channel];
  if (!procs.intersects(mem)) return trace_view(dfa, rr, word, procs, upto - 1);
  const StateId s = trace_view(dfa, rr, word, procs | mem, upto - 1);
  const auto next = dfa.delta(s, a);
  if (!next)
    throw std::logic_error("view: undefined transition along the recursion "
                           "(is the automaton diamond closed?)");
  return *next;
}

StateId trace_parent_view(const RlDfa& dfa, const RunResult& rr,
                          std::span<const Action> word, ProcessId p, std::size_t upto) {
  for (std::size_t i = upto; i >= 1; --i) {
    const Tca& pre = rr.configs[i - 1].tca;
    const ProcessId par = pre.tree.parent(p);
    if (par == -1) continue;
    const Bits mem = pre.arch.members[word[i - 1].channel];
    if (mem.test(p) && mem.test(par))
      return trace_view(dfa, rr, word, Bits::single(p) | Bits::single(par), i);
  }
  return dfa.initial();
}

namespace {

RunResult run_or_throw(const RlDfa& dfa, std::span<const Action> word) {
  RunResult rr = run(dfa, word);
  if (!rr.defined())
    throw std::invalid_argument("view: run undefined at step " +
                                std::to_string(*rr.undefined_at));
  return rr;
}

}  // namespace

StateId view(const RlDfa& dfa, std::span<const Action> word, Bits procs) {
  const RunResult rr = run_or_throw(dfa, word);
  return trace_view(dfa, rr, word, procs, word.size());
}

StateId parent_view(const RlDfa& dfa, std::span<const Action> word, ProcessId p) {
  const RunResult rr = run_or_throw(dfa, word);
  return trace_parent_view(dfa, rr, word, p, word.size());
}

ConfigSpace::ConfigSpace(const RlDfa& dfa, std::uint64_t max_configs) {
  ConfigBfs bfs;
  bfs.intern({dfa.initial(), dfa.arch0()}, max_configs);
  for (std::size_t at = 0; at < bfs.configs.size(); ++at) {
    const Config cfg = bfs.configs[at];
    for (const Action& a : dfa.delta_actions(cfg.state)) {
      if (check_valid(cfg.tca, a)) continue;
      const auto to = dfa.delta(cfg.state, a);
      if (!to) continue;
      bfs.intern({*to, apply(cfg.tca, a)}, max_configs);
    }
  }
  configs_ = std::move(bfs.configs);
  for (std::size_t i = 0; i < configs_.size(); ++i)
    by_state_[configs_[i].state].push_back(i);
}

std::vector<Tca> ConfigSpace::archs_of(StateId s) const {
  std::vector<Tca> out;
  auto it = by_state_.find(s);
  if (it == by_state_.end()) return out;
  for (std::size_t i : it->second) out.push_back(configs_[i].tca);
  return out;
}

ExplicitRlDfa::ExplicitRlDfa(std::vector<std::string> state_names, StateId initial,
                             std::vector<StateId> accepting, Tca arch0)
    : names_(std::move(state_names)),
      initial_(initial),
      accepting_(names_.size(), 0),
      arch0_(std::move(arch0)),
      trans_(names_.size()) {
  if (names_.empty()) throw std::invalid_argument("automaton needs at least one state");
  if (initial_ < 0 || initial_ >= static_cast<StateId>(names_.size()))
    throw std::invalid_argument("initial state out of range");
  for (StateId s : accepting) {
    if (s < 0 || s >= static_cast<StateId>(names_.size()))
      throw std::invalid_argument("accepting state out of range");
    accepting_[s] = 1;
  }
}

void ExplicitRlDfa::add_transition(StateId from, const Action& a, StateId to) {
  if (from < 0 || from >= state_count() || to < 0 || to >= state_count())
    throw std::invalid_argument("transition endpoint out of range");
  if (delta(from, a)) throw std::invalid_argument("duplicate transition");
  trans_[from].emplace_back(a, to);
}

std::optional<StateId> ExplicitRlDfa::delta(StateId s, const Action& a) const {
  for (const auto& [act, to] : trans_[s])
    if (act == a) return to;
  return std::nullopt;
}

std::vector<Action> ExplicitRlDfa::delta_actions(StateId s) const {
  std::vector<Action> out;
  out.reserve(trans_[s].size());
  for (const auto& [act, to] : trans_[s]) out.push_back(act);
  return out;
}

std::vector<Tca> ExplicitRlDfa::state_archs(StateId s) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!space_) space_ = std::make_unique<ConfigSpace>(*this);
  return space_->archs_of(s);
}

StateId ExplicitRlDfa::state_by_name(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<StateId>(i);
  throw std::invalid_argument("unknown state name: " + name);
}

bool ExplicitRlDfa::nop_only() const {
  for (const auto& outgoing : trans_)
    for (const auto& [act, to] : outgoing)
      if (act.op.kind != OpKind::Nop) return false;
  return true;
}

TrackerDfa::TrackerDfa(Tca arch0) : arch0_(std::move(arch0)) {
  const ValidationReport report = validate_tca(arch0_);
  if (!report.ok()) throw std::invalid_argument("tracker: initial architecture not tree-like");
  id_of(arch0_);
}

StateId TrackerDfa::id_of(const Tca& t) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = ids_.find(t);
  if (it != ids_.end()) return it->second;
  const StateId id = static_cast<StateId>(tcas_.size());
  tcas_.push_back(t);
  ids_.emplace(t, id);
  return id;
}

Tca TrackerDfa::tca_of(StateId s) const {
  std::lock_guard<std::mutex> lock(mu_);
  return tcas_.at(static_cast<std::size_t>(s));
}

std::optional<StateId> TrackerDfa::delta(StateId s, const Action& a) const {
  const Tca t = tca_of(s);
  if (check_valid(t, a)) return std::nullopt;
  return id_of(apply(t, a));
}

std::vector<Action> TrackerDfa::delta_actions(StateId s) const {
  const Tca t = tca_of(s);
  std::vector<Action> out;
  for (const Action& a : all_actions(t.process_count(), t.channel_count()))
    if (!check_valid(t, a)) out.push_back(a);
  return out;
}

std::uint64_t TrackerDfa::state_bound() const {
  const std::uint64_t n = arch0_.process_count();
  const int k = arch0_.channel_count();
  // rooted labeled trees with a labeling bijection, times all member sets
  std::uint64_t bound = 1;
  auto sat_mul = [&](std::uint64_t f) {
    if (f != 0 && bound > UINT64_MAX / f) bound = UINT64_MAX;
    else bound *= f;
  };
  for (std::uint64_t i = 0; i + 1 < n; ++i) sat_mul(n);      // n^(n-1) rooted trees
  for (std::uint64_t i = 2; i + 1 <= n; ++i) sat_mul(i);     // (n-1)! labelings
  for (int c = 0; c < k; ++c)
    for (std::uint64_t i = 0; i < n; ++i) sat_mul(2);        // 2^n member sets each
  return bound;
}

int CounterSpec::code_count() const {
  int total = 1;
  for (int m : modulus) total *= m;
  return total;
}

int CounterSpec::value_of(int code, int counter) const {
  for (int i = 0; i < counter; ++i) code /= modulus[i];
  return code % modulus[counter];
}

int CounterSpec::code_bump(int code, int counter) const {
  int radix = 1;
  for (int i = 0; i < counter; ++i) radix *= modulus[i];
  const int v = (code / radix) % modulus[counter];
  return code + radix * ((v + 1) % modulus[counter] - v);
}

CounterSpec CounterSpec::parity(int k) {
  CounterSpec spec;
  spec.counter_of.resize(k);
  for (int c = 0; c < k; ++c) spec.counter_of[c] = c;
  spec.modulus.assign(k, 2);
  spec.forbidden.assign(k, Bits{});
  spec.accepting.assign(spec.code_count(), 0);
  spec.accepting[0] = 1;  // every counter even
  return spec;
}

CounterDfa::CounterDfa(std::shared_ptr<TrackerDfa> tracker, CounterSpec spec)
    : tracker_(std::move(tracker)), spec_(std::move(spec)) {
  if (static_cast<int>(spec_.counter_of.size()) != tracker_->channel_count())
    throw std::invalid_argument("counter spec does not match the channel count");
  for (int c = 0; c < tracker_->channel_count(); ++c) {
    if (spec_.forbidden[c].none()) continue;
    // A blocking value on a shared counter would let one channel's step
    // change another's definedness, breaking the diamond property.
    for (int c2 = 0; c2 < tracker_->channel_count(); ++c2)
      if (c2 != c && spec_.counter_of[c2] == spec_.counter_of[c])
        throw std::invalid_argument("blocking values require a private counter");
  }
}

StateId CounterDfa::compose(StateId tracker_state, int code) const {
  return tracker_state * spec_.code_count() + code;
}

std::optional<StateId> CounterDfa::delta(StateId s, const Action& a) const {
  const int code = code_part(s);
  const int counter = spec_.counter_of[a.channel];
  if (spec_.forbidden[a.channel].test(spec_.value_of(code, counter)))
    return std::nullopt;
  const auto t = tracker_->delta(tracker_part(s), a);
  if (!t) return std::nullopt;
  return compose(*t, spec_.code_bump(code, counter));
}

bool CounterDfa::accepting(StateId s) const { return spec_.accepting[code_part(s)] != 0; }

std::vector<Action> CounterDfa::delta_actions(StateId s) const {
  const int code = code_part(s);
  std::vector<Action> out;
  for (const Action& a : tracker_->delta_actions(tracker_part(s))) {
    const int counter = spec_.counter_of[a.channel];
    if (!spec_.forbidden[a.channel].test(spec_.value_of(code, counter)))
      out.push_back(a);
  }
  return out;
}

std::vector<Tca> CounterDfa::state_archs(StateId s) const {
  return tracker_->state_archs(tracker_part(s));
}

std::uint64_t CounterDfa::state_bound() const {
  const std::uint64_t t = tracker_->state_bound();
  const std::uint64_t m = spec_.code_count();
  if (t > UINT64_MAX / m) return UINT64_MAX;
  return t * m;
}

std::string CounterDfa::state_name(StateId s) const {
  return tracker_->state_name(tracker_part(s)) + "#" + std::to_string(code_part(s));
}

}  // namespace rla
