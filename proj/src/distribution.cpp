#include "rla/distribution.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace rla {

namespace {

Bits pcedges_of(const LocalState& s) {
  Bits out = s.cedges;
  if (s.pedge != 0) out.set(s.pedge);
  return out;
}

// Children of this process that share channel c, as edge labels.
Bits restricted_cedges(const LocalState& s, ChannelId c) {
  Bits out;
  for (EdgeLabel e : s.cedges)
    if (s.cc[e].test(c)) out.set(e);
  return out;
}

int sync_index_of(const SyncData& sync, EdgeLabel pedge) {
  for (std::size_t i = 0; i < sync.size(); ++i)
    if (sync[i].pedge == pedge) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::size_t LocalStateHash::operator()(const LocalState& s) const {
  std::size_t h = hash_mix(static_cast<std::size_t>(s.s1), static_cast<std::size_t>(s.s2));
  h = hash_mix(h, s.listens.raw());
  h = hash_mix(h, static_cast<std::size_t>(s.pedge));
  h = hash_mix(h, s.cedges.raw());
  for (const Bits& b : s.cc) h = hash_mix(h, b.raw());
  for (const Bits& b : s.dc) h = hash_mix(h, b.raw());
  return h;
}

LocalState initial_local_state(const RlDfa& dfa, ProcessId p) {
  const Tca& a0 = dfa.arch0();
  const Tree& tree = a0.tree;
  const int n = tree.size();
  const int k = a0.channel_count();

  LocalState s;
  s.s1 = s.s2 = dfa.initial();
  for (ChannelId c = 0; c < k; ++c)
    if (a0.arch.members[c].test(p)) s.listens.set(c);
  s.pedge = tree.label(p);
  s.cedges = tree.child_labels(p);
  s.cc.assign(n, Bits{});
  s.dc.assign(n, Bits{});

  for (EdgeLabel e : pcedges_of(s)) {
    const ProcessId q = e == s.pedge ? tree.parent(p) : tree.proc_from_label(e);
    for (ChannelId c = 0; c < k; ++c)
      if (a0.arch.members[c].test(p) && a0.arch.members[c].test(q)) s.cc[e].set(c);
  }
  for (ChannelId c = 0; c < k; ++c) {
    if (s.listens.test(c)) continue;
    // Members of an unheard channel sit in exactly one direction.
    bool placed = false;
    for (EdgeLabel e : s.cedges)
      if (a0.arch.members[c].subset_of(tree.below(e))) {
        s.dc[e].set(c);
        placed = true;
        break;
      }
    if (!placed) {
      assert(s.pedge != 0);
      s.dc[s.pedge].set(c);
    }
  }
  return s;
}

SyncData build_sync(std::span<const LocalState> locals, ChannelId c) {
  std::vector<int> members;
  for (std::size_t p = 0; p < locals.size(); ++p)
    if (locals[p].listens.test(c)) members.push_back(static_cast<int>(p));
  std::sort(members.begin(), members.end(), [&](int a, int b) {
    return locals[a].pedge < locals[b].pedge;
  });

  SyncData sync;
  sync.reserve(members.size());
  for (int p : members) {
    const LocalState& s = locals[p];
    sync.push_back({s.s1, s.s2, s.pedge, restricted_cedges(s, c), Bits{}});
  }
  // Each row's channel set comes from its parent: the channels the parent
  // hides behind the connecting edge. The subtree root keeps the empty set.
  for (std::size_t i = 0; i < sync.size(); ++i) {
    const LocalState& s = locals[members[i]];
    for (EdgeLabel e : sync[i].cedges) {
      const int j = sync_index_of(sync, e);
      if (j >= 0) sync[j].channels = s.dc[e];
    }
  }
  return sync;
}

bool consistent(const SyncData& sync, const LocalState& s, ChannelId c) {
  if (!s.listens.test(c)) return false;
  if (sync.size() < 2) return false;
  for (std::size_t i = 0; i + 1 < sync.size(); ++i)
    if (sync[i].pedge >= sync[i + 1].pedge) return false;  // canonical and distinct
  if (!make_subtree(sync_neighborhoods(sync))) return false;

  const int i = sync_index_of(sync, s.pedge);
  if (i < 0) return false;
  if (sync[i].s1 != s.s1 || sync[i].s2 != s.s2) return false;
  if (sync[i].cedges != restricted_cedges(s, c)) return false;
  for (EdgeLabel e : sync[i].cedges) {
    const int j = sync_index_of(sync, e);
    if (j < 0 || sync[j].channels != s.dc[e]) return false;
  }
  return true;
}

StateId state_from_sync(DiamSolver& solver, const SyncData& sync) {
  auto shape = make_subtree(sync_neighborhoods(sync));
  if (!shape) throw std::invalid_argument("state_from_sync: inconsistent sync data");
  LabeledTree t;
  t.shape = std::move(*shape);
  t.labels.reserve(sync.size());
  for (const SyncEntry& e : sync) t.labels.push_back({e.s1, e.s2, e.channels});
  return solver.diamtree(t);
}

std::optional<LocalState> local_step(const RlDfa& dfa, DiamSolver& solver,
                                     const LocalState& s, const DataValue& d,
                                     const Action& a, std::string* why) {
  auto fail = [&](const char* reason) -> std::optional<LocalState> {
    if (why) *why = reason;
    return std::nullopt;
  };

  const ChannelId c = a.channel;
  if (!s.listens.test(c)) return fail("not listening");
  if (!consistent(d.sync, s, c)) return fail("sync data inconsistent");
  const auto shape = make_subtree(sync_neighborhoods(d.sync));
  assert(shape);

  const StateId base = state_from_sync(solver, d.sync);
  const auto next = dfa.delta(base, a);
  if (!next) return fail("no transition from the synchronized state");

  LocalState out = s;
  // The subtree root of this communication keeps its parent-shared state.
  out.s1 = s.cc[s.pedge].test(c) ? *next : s.s1;
  out.s2 = *next;

  switch (a.op.kind) {
    case OpKind::Nop:
      if (d.kind != DataKind::Sync) return fail("nop: unexpected data fields");
      return out;

    case OpKind::Swap: {
      if (d.kind != DataKind::SyncCD) return fail("swap: wrong data shape");
      const EdgeLabel e = a.op.edge;
      const int ip = sync_index_of(d.sync, e);
      if (ip < 0 || shape->parent[ip] < 0)
        return fail("swap: edge not inside the synchronized subtree");
      const int iq = shape->parent[ip];
      if (s.cedges.test(e)) {
        // the displaced parent vouches for C and D
        if (d.cset != s.cc[s.pedge]) return fail("swap: C does not match the parent-shared channels");
        if (d.dset != s.dc[s.pedge]) return fail("swap: D does not match the channels beyond the parent");
        out.pedge = e;
        out.cedges = s.cedges - Bits::single(e);
        out.dc[e] = s.dc[e] | d.dset;
        if (s.pedge != 0) {
          out.cc[s.pedge] = Bits{};
          out.dc[s.pedge] = Bits{};
        }
      } else if (s.pedge == e) {
        if (!d.cset.subset_of(s.listens))
          return fail("swap: not listening to a channel shared around the parent");
        const EdgeLabel up = d.sync[iq].pedge;
        out.pedge = up;
        out.cedges = s.cedges | Bits::single(e);
        out.cc[up] = d.cset;
        out.dc[e] = s.dc[e] - d.dset;
        out.dc[up] = d.dset;
      }
      return out;
    }

    case OpKind::Move: {
      const EdgeLabel e = a.op.edge;
      const EdgeLabel to = a.op.target;
      const int ip = sync_index_of(d.sync, e);  // the moved process may be absent
      const bool mover_here = ip >= 0;
      if (d.kind != (mover_here ? DataKind::SyncC : DataKind::SyncCD))
        return fail("move: wrong data shape");
      const int iq = sync_index_of(d.sync, to);
      if (iq < 0) return fail("move: destination not inside the synchronized subtree");
      const Bits dset = mover_here ? d.sync[ip].channels : d.dset;

      const bool old_parent = s.cedges.test(e);
      const bool destination = s.pedge == to;
      if (old_parent && destination) {
        // moving a process to its current parent leaves the tree unchanged
        if (d.cset != s.cc[e]) return fail("move: C does not match the channels shared with the mover");
        if (!mover_here && dset != s.dc[e]) return fail("move: D does not match the moved subtree");
        return out;
      }
      if (old_parent) {
        EdgeLabel link;  // edge between the old parent and the destination
        if (s.cedges.test(to)) link = to;
        else if (s.pedge != 0 && d.sync[iq].cedges.test(s.pedge)) link = s.pedge;
        else return fail("move: destination does not neighbor the old parent");
        if (d.cset != s.cc[e]) return fail("move: C does not match the channels shared with the mover");
        if (!mover_here && dset != s.dc[e]) return fail("move: D does not match the moved subtree");
        out.cedges = s.cedges - Bits::single(e);
        out.dc[link] = s.dc[link] | dset;
        out.cc[e] = Bits{};
        out.dc[e] = Bits{};
      } else if (destination) {
        if (!d.cset.subset_of(s.listens))
          return fail("move: not listening to the channels shared with the mover");
        out.cedges = s.cedges | Bits::single(e);
        out.cc[e] = d.cset;
        out.dc[e] = dset;
      }
      return out;
    }

    case OpKind::Connect: {
      if (d.kind != DataKind::SyncE) return fail("connect: wrong data shape");
      const EdgeLabel e = a.op.edge;
      const ChannelId joined = a.op.channel;
      if (joined < 0 || joined >= dfa.channel_count())
        return fail("connect: channel out of range");
      const int ip = sync_index_of(d.sync, e);
      const int iq = sync_index_of(d.sync, d.edge);
      if (ip < 0 || iq < 0) return fail("connect: endpoint not inside the synchronized subtree");
      EdgeLabel link;
      if (shape->parent[ip] == iq) link = e;
      else if (shape->parent[iq] == ip) link = d.edge;
      else return fail("connect: inviter does not neighbor the joiner");
      if (s.pedge == e) {
        if (s.listens.test(joined)) return fail("connect: already listening");
        out.listens = s.listens | Bits::single(joined);
        out.cc[link] = s.cc[link] | Bits::single(joined);
        out.dc[link] = s.dc[link] - Bits::single(joined);
      } else if (s.pedge == d.edge) {
        if (!s.listens.test(joined)) return fail("connect: inviter not listening");
        out.cc[link] = s.cc[link] | Bits::single(joined);
      }
      return out;
    }

    case OpKind::Disconnect: {
      if (d.kind != DataKind::Sync) return fail("disconnect: unexpected data fields");
      if (d.sync.size() < 3) return fail("disconnect: too few members would remain");
      const EdgeLabel e = a.op.edge;
      const int ip = sync_index_of(d.sync, e);
      if (ip < 0) return fail("disconnect: leaver not inside the synchronized subtree");
      int iq;
      EdgeLabel link;
      if (shape->kids[ip].empty() && shape->parent[ip] >= 0) {
        iq = shape->parent[ip];
        link = e;
      } else if (shape->parent[ip] < 0 && shape->kids[ip].size() == 1) {
        iq = shape->kids[ip][0];
        link = d.sync[iq].pedge;
      } else {
        return fail("disconnect: not at the channel boundary");
      }
      if (s.pedge == e) {
        if ((s.cc[link] - Bits::single(c)).none())
          return fail("disconnect: no other channel shared with the boundary neighbor");
        out.listens = s.listens - Bits::single(c);
        out.cc[link] = s.cc[link] - Bits::single(c);
        out.dc[link] = s.dc[link] | Bits::single(c);
      } else if (s.pedge == d.sync[iq].pedge) {
        if ((s.cc[link] - Bits::single(c)).none())
          return fail("disconnect: no other channel shared with the boundary neighbor");
        out.cc[link] = s.cc[link] - Bits::single(c);
      }
      return out;
    }
  }
  return fail("unknown operation");
}

std::optional<DataValue> propose_data(std::span<const LocalState> locals, const Action& a) {
  const ChannelId c = a.channel;
  bool anyone = false;
  for (const LocalState& s : locals) anyone = anyone || s.listens.test(c);
  if (!anyone) return std::nullopt;
  SyncData sync = build_sync(locals, c);

  auto participant_with_cedge = [&](EdgeLabel e) -> const LocalState* {
    for (const LocalState& s : locals)
      if (s.listens.test(c) && s.cedges.test(e)) return &s;
    return nullptr;
  };

  switch (a.op.kind) {
    case OpKind::Nop:
    case OpKind::Disconnect:
      return DataValue::plain(std::move(sync));

    case OpKind::Swap: {
      if (const LocalState* q = participant_with_cedge(a.op.edge))
        return DataValue::with_cd(std::move(sync), q->cc[q->pedge], q->dc[q->pedge]);
      return DataValue::with_cd(std::move(sync), Bits{}, Bits{});
    }

    case OpKind::Move: {
      const LocalState* qp = participant_with_cedge(a.op.edge);
      if (!qp) return DataValue::with_c(std::move(sync), Bits{});
      bool mover_in = false;
      for (const LocalState& s : locals)
        mover_in = mover_in || (s.listens.test(c) && s.pedge == a.op.edge);
      if (mover_in) return DataValue::with_c(std::move(sync), qp->cc[a.op.edge]);
      return DataValue::with_cd(std::move(sync), qp->cc[a.op.edge], qp->dc[a.op.edge]);
    }

    case OpKind::Connect: {
      // the inviter is the unique neighbor of the joiner on both channels
      const ChannelId joined = a.op.channel;
      for (const LocalState& joiner : locals) {
        if (joiner.pedge != a.op.edge) continue;
        for (const LocalState& q : locals) {
          if (&q == &joiner || !q.listens.test(c)) continue;
          if (joined < 0 || !q.listens.test(joined)) continue;
          const bool adjacent =
              q.cedges.test(joiner.pedge) || joiner.cedges.test(q.pedge);
          if (adjacent) return DataValue::with_edge(std::move(sync), q.pedge);
        }
        break;
      }
      // no inviter exists; a self-loop edge makes every process block
      return DataValue::with_edge(std::move(sync), a.op.edge);
    }
  }
  return std::nullopt;
}

std::optional<SyncData> global_sync_candidate(std::span<const LocalState> locals) {
  const int n = static_cast<int>(locals.size());
  std::vector<int> by_pedge(n, -1);
  for (int p = 0; p < n; ++p) {
    const EdgeLabel e = locals[p].pedge;
    if (e < 0 || e >= n || by_pedge[e] != -1) return std::nullopt;
    by_pedge[e] = p;
  }
  SyncData sync(n);
  for (EdgeLabel e = 0; e < n; ++e) {
    const LocalState& s = locals[by_pedge[e]];
    sync[e] = {s.s1, s.s2, e, s.cedges, Bits{}};
  }
  for (EdgeLabel e = 1; e < n; ++e) {
    int parents = 0;
    for (int p = 0; p < n; ++p)
      if (locals[p].cedges.test(e)) {
        sync[e].channels = locals[p].dc[e];
        ++parents;
      }
    if (parents != 1) return std::nullopt;
  }
  if (!make_subtree(sync_neighborhoods(sync))) return std::nullopt;
  return sync;
}

bool globally_consistent(const SyncData& sync, const LocalState& s, int channel_count) {
  const int n = static_cast<int>(sync.size());
  if (!make_subtree(sync_neighborhoods(sync))) return false;
  for (int i = 0; i < n; ++i)
    if (sync[i].pedge != i) return false;
  if (s.pedge < 0 || s.pedge >= n) return false;

  const SyncEntry& own = sync[s.pedge];
  if (own.s1 != s.s1 || own.s2 != s.s2 || own.cedges != s.cedges) return false;
  for (EdgeLabel e : s.cedges)
    if (sync[e].channels != s.dc[e]) return false;

  // The channels attributed to this subtree must be exactly the ones this
  // process hears but its parent does not, plus everything hidden below it;
  // and the process must account for each unheard channel exactly once.
  Bits below_here = s.listens - s.cc[s.pedge];
  Bits unheard;
  for (EdgeLabel e : s.cedges) {
    below_here |= s.dc[e];
    if (s.dc[e].intersects(unheard)) return false;
    unheard |= s.dc[e];
  }
  if (s.pedge != 0) {
    if (sync[s.pedge].channels != below_here) return false;
    if (s.dc[s.pedge].intersects(unheard)) return false;
    unheard |= s.dc[s.pedge];
  }
  return unheard == Bits::below(channel_count) - s.listens;
}

std::optional<DataValue> accept_data(std::span<const LocalState> locals, int channel_count) {
  auto sync = global_sync_candidate(locals);
  if (!sync) return std::nullopt;
  for (const LocalState& s : locals)
    if (!globally_consistent(*sync, s, channel_count)) return std::nullopt;
  return DataValue::plain(std::move(*sync));
}

std::optional<StateId> decode_global(DiamSolver& solver, std::span<const LocalState> locals) {
  auto sync = global_sync_candidate(locals);
  if (!sync) return std::nullopt;
  return state_from_sync(solver, *sync);
}

namespace {

std::size_t ceil_log2(std::uint64_t v) {
  return v <= 1 ? 1 : static_cast<std::size_t>(std::bit_width(v - 1));
}

}  // namespace

std::size_t serialized_bit_size(const LocalState& s, std::uint64_t state_bound, int n,
                                int k) {
  std::size_t bits = 2 * ceil_log2(state_bound);  // (s1, s2)
  bits += static_cast<std::size_t>(k);            // listening set
  bits += ceil_log2(static_cast<std::uint64_t>(n) + 1);  // pedge
  bits += static_cast<std::size_t>(n > 0 ? n - 1 : 0);   // cedges
  bits += static_cast<std::size_t>(pcedges_of(s).count()) * k;  // cc rows
  // dc assigns each unheard channel one incident edge
  bits += static_cast<std::size_t>(k - s.listens.count()) *
          ceil_log2(static_cast<std::uint64_t>(n) + 1);
  return bits;
}

std::size_t local_state_bit_bound(std::uint64_t state_bound, int n, int k) {
  return 2 * ceil_log2(state_bound) + static_cast<std::size_t>(k) +
         ceil_log2(static_cast<std::uint64_t>(n) + 1) +
         static_cast<std::size_t>(n > 0 ? n - 1 : 0) +
         static_cast<std::size_t>(n) * k +
         static_cast<std::size_t>(k) * ceil_log2(static_cast<std::uint64_t>(n) + 1);
}

Distributed distribute(std::shared_ptr<const RlDfa> dfa, bool assume_diamond_closed) {
  if (!assume_diamond_closed) {
    if (auto cex = check_diamond(*dfa))
      throw std::invalid_argument("distribute: automaton is not diamond closed (" +
                                  cex->detail + ")");
  }
  Distributed dist;
  dist.dfa = dfa;
  dist.solver = std::make_shared<DiamSolver>(*dfa);
  auto solver = dist.solver;

  const int n = dfa->process_count();
  dist.raa.processes.reserve(n);
  for (ProcessId p = 0; p < n; ++p) {
    RaaProcess<LocalState> proc;
    proc.initial = initial_local_state(*dfa, p);
    proc.step = [dfa, solver](const LocalState& s, const DataValue& d, const Action& a) {
      return local_step(*dfa, *solver, s, d, a);
    };
    proc.listening = [](const LocalState& s) { return s.listens; };
    proc.accept = [dfa, solver](const LocalState& s, const DataValue& d) {
      if (d.kind != DataKind::Sync) return false;
      if (!globally_consistent(d.sync, s, dfa->channel_count())) return false;
      return dfa->accepting(state_from_sync(*solver, d.sync));
    };
    dist.raa.processes.push_back(std::move(proc));
  }
  dist.raa.propose = [](const std::vector<LocalState>& g, const Action& a) {
    return propose_data(g, a);
  };
  dist.raa.accept_witness = [dfa](const std::vector<LocalState>& g) {
    return accept_data(g, dfa->channel_count());
  };
  return dist;
}

SpecializedRaa specialize_fixed(std::shared_ptr<const RlDfa> dfa) {
  // Static nop-only check over the transition domain.
  if (auto* explicit_dfa = dynamic_cast<const ExplicitRlDfa*>(dfa.get())) {
    if (!explicit_dfa->nop_only())
      throw std::invalid_argument("specialize_fixed: reconfiguring transition present");
  } else {
    ConfigSpace space(*dfa);
    for (const Config& cfg : space.configs())
      for (const Action& a : dfa->delta_actions(cfg.state))
        if (a.op.kind != OpKind::Nop)
          throw std::invalid_argument("specialize_fixed: reconfiguring transition present");
  }

  SpecializedRaa spec;
  spec.dfa = dfa;
  spec.solver = std::make_shared<DiamSolver>(*dfa);
  const int n = dfa->process_count();
  for (ProcessId p = 0; p < n; ++p) spec.skeleton.push_back(initial_local_state(*dfa, p));

  auto solver = spec.solver;
  auto skeleton = std::make_shared<std::vector<LocalState>>(spec.skeleton);
  auto inflate = [skeleton](const std::vector<PairState>& pairs) {
    std::vector<LocalState> full = *skeleton;
    for (std::size_t p = 0; p < full.size(); ++p) {
      full[p].s1 = pairs[p].s1;
      full[p].s2 = pairs[p].s2;
    }
    return full;
  };

  for (ProcessId p = 0; p < n; ++p) {
    RaaProcess<PairState> proc;
    proc.initial = {dfa->initial(), dfa->initial()};
    proc.step = [dfa, solver, skeleton, p](const PairState& ps, const DataValue& d,
                                           const Action& a) -> std::optional<PairState> {
      if (a.op.kind != OpKind::Nop) return std::nullopt;
      LocalState full = (*skeleton)[p];
      full.s1 = ps.s1;
      full.s2 = ps.s2;
      auto next = local_step(*dfa, *solver, full, d, a);
      if (!next) return std::nullopt;
      return PairState{next->s1, next->s2};
    };
    proc.listening = [skeleton, p](const PairState&) { return (*skeleton)[p].listens; };
    proc.accept = [dfa, solver, skeleton, p](const PairState& ps, const DataValue& d) {
      if (d.kind != DataKind::Sync) return false;
      LocalState full = (*skeleton)[p];
      full.s1 = ps.s1;
      full.s2 = ps.s2;
      if (!globally_consistent(d.sync, full, dfa->channel_count())) return false;
      return dfa->accepting(state_from_sync(*solver, d.sync));
    };
    spec.raa.processes.push_back(std::move(proc));
  }
  spec.raa.propose = [inflate](const std::vector<PairState>& g, const Action& a) {
    return propose_data(inflate(g), a);
  };
  spec.raa.accept_witness = [inflate, dfa](const std::vector<PairState>& g) {
    return accept_data(inflate(g), dfa->channel_count());
  };
  return spec;
}

}  // namespace rla
