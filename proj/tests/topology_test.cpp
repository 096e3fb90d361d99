#include <doctest.h>

#include "fixtures.hpp"
#include "rla/harness.hpp"
#include "rla/topology.hpp"

using namespace rla;

TEST_CASE("fig2 is a tree-like communication architecture") {
  CHECK(validate_tca(fixtures::fig2()).ok());
}

TEST_CASE("dropping p2 from c1 breaks edge coverage at label 1") {
  Tca t = fixtures::fig2();
  t.arch.members[0].reset(1);
  const auto report = validate_tca(t);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].condition == 3);
  CHECK(report.violations[0].edge == 1);
}

TEST_CASE("dropping p3 from c2 disconnects it") {
  Tca t = fixtures::fig2();
  t.arch.members[1].reset(2);
  const auto report = validate_tca(t);
  REQUIRE(!report.ok());
  const auto& v = report.violations.front();
  CHECK(v.condition == 2);
  CHECK(v.channel == 1);
  CHECK(v.a == 0);  // p1
  CHECK(v.b == 3);  // p4
}

TEST_CASE("a single-member channel is rejected") {
  Tca t = fixtures::fig2();
  t.arch.members[2] = Bits::of({2});
  const auto report = validate_tca(t);
  REQUIRE(!report.ok());
  CHECK(report.violations.front().condition == 1);
  CHECK(report.violations.front().channel == 2);
}

TEST_CASE("members outside the process universe are a usage error") {
  Tca t = fixtures::fig2();
  t.arch.members[0].set(7);
  CHECK_THROWS_AS(validate_tca(t), std::invalid_argument);
}

TEST_CASE("neighborhoods of fig2") {
  const auto nb = neighborhoods(fixtures::fig2().tree);
  CHECK(nb[0] == Neighborhood{0, Bits::of({1, 2})});
  CHECK(nb[1] == Neighborhood{1, Bits{}});
  CHECK(nb[2] == Neighborhood{2, Bits::of({3, 4})});
  CHECK(nb[3] == Neighborhood{3, Bits{}});
  CHECK(nb[4] == Neighborhood{4, Bits{}});
}

TEST_CASE("neighborhoods of a single node and a chain") {
  const auto single = neighborhoods(Tree::single_node());
  CHECK(single[0] == Neighborhood{0, Bits{}});

  const Tree chain({-1, 0, 1}, {0, 1, 2});
  const auto nb = neighborhoods(chain);
  CHECK(nb[0] == Neighborhood{0, Bits::of({1})});
  CHECK(nb[1] == Neighborhood{1, Bits::of({2})});
  CHECK(nb[2] == Neighborhood{2, Bits{}});
}

TEST_CASE("make_tree round trips") {
  const Tree t = fixtures::fig2().tree;
  const auto rebuilt = make_tree(neighborhoods(t));
  REQUIRE(rebuilt);
  CHECK(*rebuilt == t);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Tca tca = gen_tca(2 + seed % 5, 1, seed);
    const auto again = make_tree(neighborhoods(tca.tree));
    REQUIRE(again);
    CHECK(*again == tca.tree);
  }
}

TEST_CASE("make_tree from a two-entry family") {
  const auto t = make_tree({{0, Bits::of({1})}, {1, Bits{}}});
  REQUIRE(t);
  CHECK(t->root() == 0);
  CHECK(t->parent(1) == 0);
  CHECK(t->label(1) == 1);
}

TEST_CASE("make_tree rejects inconsistent families with named clauses") {
  std::string why;
  CHECK(!make_tree({{0, Bits{}}, {0, Bits{}}}, &why));
  CHECK(why == "multiple roots");

  CHECK(!make_tree({{0, Bits::of({1})}, {1, Bits{}}, {1, Bits{}}}, &why));
  CHECK(why == "duplicate pedge");

  CHECK(!make_tree({{0, Bits{}}, {1, Bits{}}}, &why));
  CHECK(why == "pedge matched by no cedges");

  CHECK(!make_tree({{0, Bits::of({1})}, {1, Bits::of({2})}, {2, Bits::of({1})},
                    {3, Bits{}}},
                   &why));
  CHECK(!why.empty());  // label 1 is claimed twice

  // a -> c -> b -> a cycle next to an isolated root
  CHECK(!make_tree({{0, Bits{}}, {1, Bits::of({2})}, {2, Bits::of({3})},
                    {3, Bits::of({1})}},
                   &why));
  CHECK(why == "cycle");
}

TEST_CASE("proc_from_label matches fig2 and is a bijection") {
  const Tree t = fixtures::fig2().tree;
  CHECK(t.proc_from_label(0) == 0);  // p1 is the root
  CHECK(t.proc_from_label(2) == 2);  // p3
  CHECK(t.proc_from_label(3) == 3);  // p4

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Tca tca = gen_tca(2 + seed % 5, 1, seed + 100);
    Bits seen;
    for (EdgeLabel e = 0; e < tca.tree.size(); ++e) {
      const ProcessId p = tca.tree.proc_from_label(e);
      CHECK(!seen.test(p));
      seen.set(p);
      CHECK(tca.tree.label(p) == e);
    }
    CHECK(seen == Bits::below(tca.tree.size()));
  }
}

TEST_CASE("make_subtree accepts subsets and rejects malformed families") {
  // p3 and p5 as they appear in a communication on c3
  const std::vector<Neighborhood> family{{2, Bits::of({4})}, {4, Bits{}}};
  const auto st = make_subtree(family);
  REQUIRE(st);
  CHECK(st->root == 0);
  CHECK(st->parent[1] == 0);

  // a cedge naming no member
  CHECK(!make_subtree(std::vector<Neighborhood>{{2, Bits::of({4})}, {5, Bits{}}}));
  // duplicate pedges
  CHECK(!make_subtree(std::vector<Neighborhood>{{2, Bits{}}, {2, Bits{}}}));
  // two roots
  CHECK(!make_subtree(std::vector<Neighborhood>{{2, Bits{}}, {4, Bits{}}}));
}
