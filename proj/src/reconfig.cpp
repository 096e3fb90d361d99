#include "rla/reconfig.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace rla {

namespace {

Bits shared_channels(const Tca& t, ProcessId p, ProcessId q) {
  Bits out;
  for (ChannelId c = 0; c < t.channel_count(); ++c)
    if (t.arch.members[c].test(p) && t.arch.members[c].test(q)) out.set(c);
  return out;
}

bool label_ok(const Tca& t, EdgeLabel e) { return e >= 0 && e < t.process_count(); }

}  // namespace

std::optional<std::string> check_valid(const Tca& tca, const Action& a) {
  const Tree& tree = tca.tree;
  const int n = tca.process_count();
  if (a.channel < 0 || a.channel >= tca.channel_count())
    throw std::invalid_argument("action channel outside the universe");
  const Bits mem = tca.arch.members[a.channel];

  switch (a.op.kind) {
    case OpKind::Nop:
      return std::nullopt;

    case OpKind::Swap: {
      const EdgeLabel e = a.op.edge;
      if (e < 1 || e >= n) return "swap: edge label out of range";
      const ProcessId p = tree.proc_from_label(e);
      const ProcessId q = tree.parent(p);
      if (!mem.test(p)) return "swap: child not a channel member";
      if (!mem.test(q)) return "swap: parent not a channel member";
      if (tree.parent(q) != -1) {
        const ProcessId q2 = tree.parent(q);
        if (!shared_channels(tca, q, q2).subset_of(shared_channels(tca, p, q2)))
          return "swap: child misses a channel shared by parent and grandparent";
      }
      return std::nullopt;
    }

    case OpKind::Move: {
      const EdgeLabel e = a.op.edge, t = a.op.target;
      if (e < 1 || e >= n) return "move: edge label out of range";
      if (!label_ok(tca, t) || t == e) return "move: target label out of range";
      const ProcessId p = tree.proc_from_label(e);
      const ProcessId q = tree.proc_from_label(t);
      const ProcessId q2 = tree.parent(p);
      // Moving p to its current parent is the trivial move; otherwise the
      // destination must neighbor the parent (grandparent or sibling).
      if (q != q2 && !tree.adjacent(q, q2))
        return "move: destination does not neighbor the parent";
      if (!mem.test(q)) return "move: destination not a channel member";
      if (!mem.test(q2)) return "move: parent not a channel member";
      for (ChannelId c : shared_channels(tca, p, q2))
        if (!tca.arch.members[c].test(q))
          return "move: destination misses a channel shared with the moved process";
      return std::nullopt;
    }

    case OpKind::Connect: {
      const EdgeLabel e = a.op.edge;
      const ChannelId c2 = a.op.channel;
      if (!label_ok(tca, e)) return "connect: edge label out of range";
      if (c2 < 0 || c2 >= tca.channel_count())
        throw std::invalid_argument("connect target channel outside the universe");
      const ProcessId p = tree.proc_from_label(e);
      if (tca.arch.members[c2].test(p)) return "connect: already a member";
      if (!mem.test(p)) return "connect: process not on the carrying channel";
      const Bits inviters = tree.neighbors(p) & mem & tca.arch.members[c2];
      if (inviters.none()) return "connect: no neighbor on both channels";
      return std::nullopt;
    }

    case OpKind::Disconnect: {
      const EdgeLabel e = a.op.edge;
      if (!label_ok(tca, e)) return "disconnect: edge label out of range";
      const ProcessId p = tree.proc_from_label(e);
      if (!mem.test(p)) return "disconnect: not a member";
      if (mem.count() < 3) return "disconnect: fewer than two members would remain";
      const Bits nb = tree.neighbors(p) & mem;
      if (nb.count() != 1) return "disconnect: not at the channel boundary";
      const ProcessId q = nb.lowest();
      if ((shared_channels(tca, p, q) - Bits::single(a.channel)).none())
        return "disconnect: no other channel shared with the boundary neighbor";
      return std::nullopt;
    }
  }
  return "unknown operation";
}

Tca apply(const Tca& tca, const Action& a) {
  if (auto why = check_valid(tca, a)) throw std::invalid_argument(*why);

  Tca out = tca;
  const Tree& tree = tca.tree;
  switch (a.op.kind) {
    case OpKind::Nop:
      break;

    case OpKind::Swap: {
      const ProcessId p = tree.proc_from_label(a.op.edge);
      const ProcessId q = tree.parent(p);
      const int n = tca.process_count();
      std::vector<ProcessId> parent(n);
      std::vector<EdgeLabel> label(n);
      for (ProcessId x = 0; x < n; ++x) {
        parent[x] = tree.parent(x);
        label[x] = tree.label(x);
      }
      // p takes q's position: it inherits q's parent edge (or the root
      // marker), and q hangs below p on the edge that still carries e.
      parent[p] = tree.parent(q);
      label[p] = tree.label(q);
      parent[q] = p;
      label[q] = a.op.edge;
      out.tree = Tree(std::move(parent), std::move(label));
      break;
    }

    case OpKind::Move: {
      const ProcessId p = tree.proc_from_label(a.op.edge);
      const ProcessId q = tree.proc_from_label(a.op.target);
      const int n = tca.process_count();
      std::vector<ProcessId> parent(n);
      std::vector<EdgeLabel> label(n);
      for (ProcessId x = 0; x < n; ++x) {
        parent[x] = tree.parent(x);
        label[x] = tree.label(x);
      }
      parent[p] = q;  // the moved edge keeps its label
      out.tree = Tree(std::move(parent), std::move(label));
      break;
    }

    case OpKind::Connect:
      out.arch.members[a.op.channel].set(tree.proc_from_label(a.op.edge));
      break;

    case OpKind::Disconnect:
      out.arch.members[a.channel].reset(tree.proc_from_label(a.op.edge));
      break;
  }
  return out;
}

namespace {

int depth_of(const Tree& t, ProcessId p) {
  int d = 0;
  while (t.parent(p) != -1) {
    p = t.parent(p);
    ++d;
  }
  return d;
}

}  // namespace

std::vector<Action> plan(const Tca& from, const Tca& to) {
  const int n = from.process_count();
  const int k = from.channel_count();
  if (to.process_count() != n || to.channel_count() != k)
    throw std::invalid_argument("plan: mismatched universes");
  if (!validate_tca(from).ok() || !validate_tca(to).ok())
    throw std::invalid_argument("plan: endpoints must be valid TCAs");

  Tca cur = from;
  std::vector<Action> out;
  auto emit = [&](const Action& a) {
    cur = apply(cur, a);
    out.push_back(a);
  };
  // Moves one process a level up; only correct once every process is on
  // every channel, which phase 1 establishes.
  auto flatten = [&]() {
    bool again = true;
    while (again) {
      again = false;
      for (EdgeLabel lab = 1; lab < n; ++lab) {
        const ProcessId p = cur.tree.proc_from_label(lab);
        if (depth_of(cur.tree, p) >= 2) {
          const ProcessId g = cur.tree.parent(cur.tree.parent(p));
          emit({0, Op::move(lab, cur.tree.label(g))});
          again = true;
        }
      }
    }
  };

  // Phase 1: grow every channel to the full process set, inviting along the
  // tree frontier.
  const Bits everyone = Bits::below(n);
  for (ChannelId c2 = 0; c2 < k; ++c2) {
    while (cur.arch.members[c2] != everyone) {
      ProcessId joiner = -1, inviter = -1;
      EdgeLabel joiner_label = -1;
      for (EdgeLabel lab = 0; lab < n && joiner == -1; ++lab) {
        const ProcessId p = cur.tree.proc_from_label(lab);
        if (cur.arch.members[c2].test(p)) continue;
        const Bits nb = cur.tree.neighbors(p) & cur.arch.members[c2];
        if (nb.none()) continue;
        joiner = p;
        joiner_label = lab;
        int best = n + 1;
        for (ProcessId x : nb)
          if (cur.tree.label(x) < best) {
            best = cur.tree.label(x);
            inviter = x;
          }
      }
      assert(joiner != -1);
      const ChannelId carrier = shared_channels(cur, joiner, inviter).lowest();
      emit({carrier, Op::connect(joiner_label, c2)});
    }
  }

  // Phase 2: flatten into a star.
  flatten();

  // Phase 3: place the target edge labels (and thereby the target root) by
  // swapping leaves with the root; each swap trades the two labels.
  while (true) {
    ProcessId mismatch = -1;
    for (EdgeLabel lab = 0; lab < n && mismatch == -1; ++lab) {
      const ProcessId p = cur.tree.proc_from_label(lab);
      if (cur.tree.label(p) != to.tree.label(p)) mismatch = p;
    }
    if (mismatch == -1) break;
    const ProcessId rho = cur.tree.root();
    if (to.tree.label(rho) == 0) {
      emit({0, Op::swap(cur.tree.label(mismatch))});
    } else {
      const ProcessId holder = cur.tree.proc_from_label(to.tree.label(rho));
      emit({0, Op::swap(cur.tree.label(holder))});
    }
    flatten();
  }

  // Phase 4: rebuild the target levels top-down; each process rides down its
  // chain of target ancestors. Labels follow the moved process, so they stay
  // in their final position.
  std::vector<ProcessId> order(n);
  for (ProcessId p = 0; p < n; ++p) order[p] = p;
  std::sort(order.begin(), order.end(), [&](ProcessId x, ProcessId y) {
    const int dx = depth_of(to.tree, x), dy = depth_of(to.tree, y);
    return dx != dy ? dx < dy : to.tree.label(x) < to.tree.label(y);
  });
  for (const ProcessId p : order) {
    if (depth_of(to.tree, p) < 2) continue;
    std::vector<ProcessId> chain;  // target ancestors, from depth 1 down
    for (ProcessId a = to.tree.parent(p); to.tree.parent(a) != -1; a = to.tree.parent(a))
      chain.push_back(a);
    std::reverse(chain.begin(), chain.end());
    for (const ProcessId a : chain)
      emit({0, Op::move(cur.tree.label(p), cur.tree.label(a))});
  }

  // Phase 5: shed extra memberships, boundary leaves first.
  for (ChannelId c = 0; c < k; ++c) {
    while (cur.arch.members[c] != to.arch.members[c]) {
      ProcessId victim = -1;
      for (EdgeLabel lab = 0; lab < n && victim == -1; ++lab) {
        const ProcessId p = cur.tree.proc_from_label(lab);
        if (!cur.arch.members[c].test(p) || to.arch.members[c].test(p)) continue;
        if ((cur.tree.neighbors(p) & cur.arch.members[c]).count() == 1) victim = p;
      }
      assert(victim != -1);
      emit({c, Op::disconnect(cur.tree.label(victim))});
    }
  }

  if (!(cur == to)) throw std::logic_error("plan: replay did not reach the target");
  return out;
}

std::vector<Op> all_ops(int n, int k) {
  std::vector<Op> ops;
  ops.push_back(Op::nop());
  for (EdgeLabel e = 1; e < n; ++e) ops.push_back(Op::swap(e));
  for (EdgeLabel e = 1; e < n; ++e)
    for (EdgeLabel t = 0; t < n; ++t)
      if (t != e) ops.push_back(Op::move(e, t));
  for (EdgeLabel e = 0; e < n; ++e)
    for (ChannelId c = 0; c < k; ++c) ops.push_back(Op::connect(e, c));
  for (EdgeLabel e = 0; e < n; ++e) ops.push_back(Op::disconnect(e));
  return ops;
}

std::vector<Action> all_actions(int n, int k) {
  std::vector<Action> out;
  const std::vector<Op> ops = all_ops(n, k);
  for (ChannelId c = 0; c < k; ++c)
    for (const Op& op : ops) out.push_back({c, op});
  return out;
}

}  // namespace rla
