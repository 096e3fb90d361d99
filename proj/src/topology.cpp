#include "rla/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace rla {

Tree::Tree(std::vector<ProcessId> parent, std::vector<EdgeLabel> label)
    : parent_(std::move(parent)), label_(std::move(label)) {
  const int n = static_cast<int>(parent_.size());
  if (n == 0 || label_.size() != parent_.size())
    throw std::invalid_argument("tree: empty or mismatched parent/label arrays");
  if (n > 64) throw std::invalid_argument("tree: at most 64 processes supported");

  by_label_.assign(n, -1);
  int roots = 0;
  for (ProcessId p = 0; p < n; ++p) {
    if (parent_[p] == -1) {
      ++roots;
      root_ = p;
      if (label_[p] != 0) throw std::invalid_argument("tree: root must carry label 0");
    } else {
      if (parent_[p] < 0 || parent_[p] >= n)
        throw std::invalid_argument("tree: parent out of range");
      if (label_[p] < 1 || label_[p] >= n)
        throw std::invalid_argument("tree: edge label out of range");
    }
    if (by_label_[label_[p]] != -1)
      throw std::invalid_argument("tree: duplicate edge label");
    by_label_[label_[p]] = p;
  }
  if (roots != 1) throw std::invalid_argument("tree: exactly one root required");

  // The parent relation must reach the root from every node.
  for (ProcessId p = 0; p < n; ++p) {
    ProcessId q = p;
    for (int steps = 0; q != root_; ++steps) {
      if (steps > n) throw std::invalid_argument("tree: parent relation has a cycle");
      q = parent_[q];
    }
  }
}

Bits Tree::children(ProcessId p) const {
  Bits out;
  for (ProcessId q = 0; q < size(); ++q)
    if (parent_[q] == p) out.set(q);
  return out;
}

Bits Tree::child_labels(ProcessId p) const {
  Bits out;
  for (ProcessId q = 0; q < size(); ++q)
    if (parent_[q] == p) out.set(label_[q]);
  return out;
}

Bits Tree::neighbors(ProcessId p) const {
  Bits out = children(p);
  if (parent_[p] != -1) out.set(parent_[p]);
  return out;
}

Bits Tree::below(EdgeLabel e) const {
  Bits out = Bits::single(proc_from_label(e));
  // Repeatedly pull in children of anything already collected.
  bool grew = true;
  while (grew) {
    grew = false;
    for (ProcessId q = 0; q < size(); ++q)
      if (!out.test(q) && parent_[q] != -1 && out.test(parent_[q])) {
        out.set(q);
        grew = true;
      }
  }
  return out;
}

std::size_t TreeHash::operator()(const Tree& t) const {
  std::size_t h = 0x51ed270b;
  for (int p = 0; p < t.size(); ++p) {
    h = hash_mix(h, static_cast<std::size_t>(t.parent(p) + 1));
    h = hash_mix(h, static_cast<std::size_t>(t.label(p)));
  }
  return h;
}

std::size_t TcaHash::operator()(const Tca& t) const {
  std::size_t h = TreeHash{}(t.tree);
  for (const Bits& m : t.arch.members) h = hash_mix(h, m.raw());
  return h;
}

std::string TcaViolation::to_string(std::span<const std::string> proc_names,
                                    std::span<const std::string> chan_names) const {
  switch (condition) {
    case 1:
      return "COND1 channel=" + chan_names[channel];
    case 2:
      return "COND2 channel=" + chan_names[channel] + " witness=" + proc_names[a] +
             "," + proc_names[b];
    default:
      return "COND3 edge=" + std::to_string(edge);
  }
}

ValidationReport validate_tca(const CommArch& arch, const Tree& tree) {
  const int n = tree.size();
  const Bits all = Bits::below(n);
  ValidationReport report;

  for (ChannelId c = 0; c < arch.channel_count(); ++c) {
    const Bits mem = arch.members[c];
    if (!mem.subset_of(all))
      throw std::invalid_argument("validate_tca: channel member outside the process universe");
    if (mem.count() < 2) {
      report.violations.push_back({1, c, 0, -1, -1});
      continue;
    }
    // Connectivity of the member set: flood fill inside mem from its lowest
    // element, following tree adjacency restricted to mem.
    Bits seen = Bits::single(mem.lowest());
    bool grew = true;
    while (grew) {
      grew = false;
      for (ProcessId p : mem)
        if (!seen.test(p) && (tree.neighbors(p) & seen).any()) {
          seen.set(p);
          grew = true;
        }
    }
    if (seen != mem) {
      report.violations.push_back({2, c, 0, seen.lowest(), (mem - seen).lowest()});
    }
  }

  for (EdgeLabel e = 1; e < n; ++e) {
    const ProcessId p = tree.proc_from_label(e);
    const ProcessId q = tree.parent(p);
    bool covered = false;
    for (ChannelId c = 0; c < arch.channel_count() && !covered; ++c)
      covered = arch.members[c].test(p) && arch.members[c].test(q);
    if (!covered) report.violations.push_back({3, -1, e, p, q});
  }
  return report;
}

std::vector<Neighborhood> neighborhoods(const Tree& tree) {
  std::vector<Neighborhood> out(tree.size());
  for (ProcessId p = 0; p < tree.size(); ++p)
    out[p] = Neighborhood{tree.label(p), tree.child_labels(p)};
  return out;
}

std::optional<Tree> make_tree(const std::vector<Neighborhood>& family, std::string* why) {
  auto fail = [&](const char* reason) -> std::optional<Tree> {
    if (why) *why = reason;
    return std::nullopt;
  };
  const int n = static_cast<int>(family.size());
  if (n == 0) return fail("empty family");

  int root = -1;
  std::vector<ProcessId> by_pedge(n, -1);
  for (ProcessId p = 0; p < n; ++p) {
    const Neighborhood& nb = family[p];
    if (nb.pedge < 0 || nb.pedge >= n || !nb.cedges.subset_of(Bits::below(n)) ||
        nb.cedges.test(0))
      return fail("edge label out of range");
    if (nb.cedges.test(nb.pedge)) return fail("pedge among cedges");
    if (by_pedge[nb.pedge] != -1)
      return fail(nb.pedge == 0 ? "multiple roots" : "duplicate pedge");
    by_pedge[nb.pedge] = p;
    if (nb.pedge == 0) root = p;
  }
  if (root == -1) return fail("no root");

  std::vector<ProcessId> parent(n, -1);
  std::vector<EdgeLabel> label(n, 0);
  for (ProcessId p = 0; p < n; ++p) {
    label[p] = family[p].pedge;
    if (p == root) continue;
    int matches = 0;
    for (ProcessId q = 0; q < n; ++q)
      if (family[q].cedges.test(family[p].pedge)) {
        parent[p] = q;
        ++matches;
      }
    if (matches == 0) return fail("pedge matched by no cedges");
    if (matches > 1) return fail("pedge matched by several cedges");
  }
  // Stray cedge entries (labels that are nobody's pedge) break the bijection.
  for (ProcessId p = 0; p < n; ++p)
    for (EdgeLabel e : family[p].cedges)
      if (by_pedge[e] == -1) return fail("cedge names no process");

  for (ProcessId p = 0; p < n; ++p) {
    ProcessId q = p;
    for (int steps = 0; q != root; ++steps) {
      if (steps > n) return fail("cycle");
      q = parent[q];
    }
  }
  return Tree(std::move(parent), std::move(label));
}

std::optional<SubTree> make_subtree(std::span<const Neighborhood> family) {
  const int k = static_cast<int>(family.size());
  if (k == 0) return std::nullopt;

  SubTree st;
  st.parent.assign(k, -1);
  st.kids.assign(k, {});

  // pedges must be pairwise distinct.
  std::vector<std::pair<EdgeLabel, int>> by_pedge;
  for (int i = 0; i < k; ++i) {
    if (family[i].cedges.test(family[i].pedge)) return std::nullopt;
    by_pedge.emplace_back(family[i].pedge, i);
  }
  std::sort(by_pedge.begin(), by_pedge.end());
  for (int i = 0; i + 1 < k; ++i)
    if (by_pedge[i].first == by_pedge[i + 1].first) return std::nullopt;

  auto index_of = [&](EdgeLabel e) -> int {
    auto it = std::lower_bound(by_pedge.begin(), by_pedge.end(),
                               std::make_pair(e, -1));
    if (it == by_pedge.end() || it->first != e) return -1;
    return it->second;
  };

  for (int i = 0; i < k; ++i) {
    for (EdgeLabel e : family[i].cedges) {
      const int j = index_of(e);
      if (j == -1) return std::nullopt;          // cedge names no member
      if (st.parent[j] != -1) return std::nullopt;  // doubly parented
      st.parent[j] = i;
      st.kids[i].push_back(j);
    }
  }
  for (int i = 0; i < k; ++i) {
    std::sort(st.kids[i].begin(), st.kids[i].end(),
              [&](int a, int b) { return family[a].pedge < family[b].pedge; });
    if (st.parent[i] == -1) {
      if (st.root != -1) return std::nullopt;  // two roots
      st.root = i;
    }
  }
  if (st.root == -1) return std::nullopt;  // all parented: a cycle

  // Acyclicity / connectedness.
  for (int i = 0; i < k; ++i) {
    int q = i;
    for (int steps = 0; q != st.root; ++steps) {
      if (steps > k) return std::nullopt;
      q = st.parent[q];
    }
  }
  return st;
}

}  // namespace rla
