// Tree-like communication architectures: rooted labeled spanning trees,
// channel membership maps, and the neighborhood <-> tree correspondence.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rla/bits.hpp"

namespace rla {

using ProcessId = int;
using ChannelId = int;
using EdgeLabel = int;

// Local picture a process has of the spanning tree: the label of the edge
// toward its parent (0 for the root) and the labels of its child edges.
struct Neighborhood {
  EdgeLabel pedge = 0;
  Bits cedges;
  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

// Rooted tree over processes 0..n-1 whose n-1 edges carry the labels 1..n-1
// bijectively. Each non-root process is identified with the label of its
// parent edge; label 0 stands for the root.
class Tree {
 public:
  Tree() = default;

  // parent[p] = parent process (-1 for the root), label[p] = label of the
  // edge from p to its parent (0 for the root). Throws std::invalid_argument
  // when the input is not a labeled rooted tree.
  Tree(std::vector<ProcessId> parent, std::vector<EdgeLabel> label);

  static Tree single_node() { return Tree({-1}, {0}); }

  int size() const { return static_cast<int>(parent_.size()); }
  ProcessId root() const { return root_; }
  ProcessId parent(ProcessId p) const { return parent_[p]; }
  EdgeLabel label(ProcessId p) const { return label_[p]; }
  ProcessId proc_from_label(EdgeLabel e) const { return by_label_[e]; }

  Bits children(ProcessId p) const;            // as process ids
  Bits child_labels(ProcessId p) const;        // as edge labels
  Bits neighbors(ProcessId p) const;           // parent + children
  // Processes in the subtree hanging below edge label e (e >= 1),
  // i.e. proc_from_label(e) and all its descendants.
  Bits below(EdgeLabel e) const;

  bool adjacent(ProcessId p, ProcessId q) const {
    return parent_[p] == q || parent_[q] == p;
  }

  friend bool operator==(const Tree& a, const Tree& b) {
    return a.parent_ == b.parent_ && a.label_ == b.label_;
  }

 private:
  std::vector<ProcessId> parent_;
  std::vector<EdgeLabel> label_;
  std::vector<ProcessId> by_label_;  // label -> process, [0] = root
  ProcessId root_ = 0;
};

// Channel membership map: members[c] is the set of processes listening to c.
struct CommArch {
  std::vector<Bits> members;
  int channel_count() const { return static_cast<int>(members.size()); }
  friend bool operator==(const CommArch&, const CommArch&) = default;
};

struct Tca {
  CommArch arch;
  Tree tree;
  int process_count() const { return tree.size(); }
  int channel_count() const { return arch.channel_count(); }
  friend bool operator==(const Tca&, const Tca&) = default;
};

struct TreeHash {
  std::size_t operator()(const Tree& t) const;
};
struct TcaHash {
  std::size_t operator()(const Tca& t) const;
};

// One violated condition of the tree-likeness definition. condition is 1, 2
// or 3; the remaining fields identify the offending channel or edge and a
// witness pair of processes where that is meaningful.
struct TcaViolation {
  int condition = 0;
  ChannelId channel = -1;
  EdgeLabel edge = 0;
  ProcessId a = -1;
  ProcessId b = -1;
  std::string to_string(std::span<const std::string> proc_names,
                        std::span<const std::string> chan_names) const;
};

struct ValidationReport {
  std::vector<TcaViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the three conditions: every channel has at least two members, every
// channel's member set is connected in the tree, and every tree edge is
// covered by some channel. Throws std::invalid_argument on mismatched
// universes (e.g. member ids outside the tree).
ValidationReport validate_tca(const CommArch& arch, const Tree& tree);
inline ValidationReport validate_tca(const Tca& t) { return validate_tca(t.arch, t.tree); }

std::vector<Neighborhood> neighborhoods(const Tree& tree);

// Rebuilds a tree from a full family of neighborhoods (one per process).
// Returns nullopt and a reason ("multiple roots", "duplicate pedge", ...)
// when the family is inconsistent.
std::optional<Tree> make_tree(const std::vector<Neighborhood>& family,
                              std::string* why = nullptr);

// Shape of a subtree reconstructed from a subset of neighborhoods, indexed
// by position in the input family. kids lists are ordered by the child's
// pedge. Every cedge entry must name the pedge of another family member and
// every non-root member must be named by exactly one cedge.
struct SubTree {
  int root = -1;
  std::vector<int> parent;             // index into the family, -1 at the root
  std::vector<std::vector<int>> kids;  // indices, ascending child pedge
  int size() const { return static_cast<int>(parent.size()); }
};

std::optional<SubTree> make_subtree(std::span<const Neighborhood> family);

}  // namespace rla
