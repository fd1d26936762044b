#include <stdexcept>
#include <set>

#include "doctest.h"
#include "dynsys/reverse.hpp"
#include "dynsys/trajectory.hpp"

using namespace dynsys;

namespace {

std::vector<Nat> nats(std::initializer_list<std::uint64_t> xs) {
  std::vector<Nat> out;
  for (auto x : xs) out.push_back(Nat::of(x));
  return out;
}

}  // namespace

TEST_CASE("direct predecessors of the built-in systems") {
  CHECK(predecessors(builtin("simple"), Nat::of(3)).values == nats({6, 7}));

  ReverseCaps mu12;
  mu12.param_cap = 12;
  PredecessorList reduced = predecessors(builtin("collatz-reduced"), Nat::of(1), mu12);
  CHECK(reduced.values == nats({5, 85, 341}));
  CHECK(reduced.unbounded_family);
  CHECK(reduced.cap_truncated);

  ReverseCaps cap40;
  cap40.param_cap = 40;
  cap40.value_cap = Nat::of(40);
  PredecessorList mp = predecessors(builtin("mp"), Nat::of(1), cap40);
  CHECK(mp.values == nats({5, 7, 11, 13, 17, 19, 23, 29, 31, 37}));

  CHECK_THROWS_AS((void)predecessors(builtin("collatz"), Nat::of(3)), std::invalid_argument);
  CHECK_THROWS_AS((void)predecessors(builtin("simple"), Nat::of(0)), std::domain_error);
}

TEST_CASE("reverse soundness: predecessors step forward onto their node") {
  ReverseCaps caps;
  caps.param_cap = 24;
  caps.value_cap = Nat::of(10'000'000);
  for (const std::string& name : builtin_names()) {
    const SystemDef& sys = builtin(name);
    if (!sys.has_reverse()) continue;
    for (std::uint64_t m = 0; m <= 500; ++m) {
      if (!admits(sys, Nat::of(m))) continue;
      PredecessorList preds = predecessors(sys, Nat::of(m), caps);
      CHECK(preds.duplicates_rejected == 0);
      for (Nat p : preds.values) {
        StepResult step = eval_forward(sys, p);
        REQUIRE_MESSAGE(step.kind == StepResult::Kind::Next, name, " m=", m);
        REQUIRE_MESSAGE(step.value == Nat::of(m), name, " m=", m, " pred=", p.str());
      }
    }
  }
}

TEST_CASE("simple reverse tree is the perfect binary tree") {
  ReverseTree tree = build_reverse_tree(builtin("simple"), Nat::of(1), 3);
  REQUIRE(tree.nodes.size() == 15);
  std::set<std::uint64_t> values;
  for (const ReverseTreeNode& n : tree.nodes) values.insert(static_cast<std::uint64_t>(n.value.v));
  std::set<std::uint64_t> expect;
  for (std::uint64_t v = 1; v <= 15; ++v) expect.insert(v);
  CHECK(values == expect);
  CHECK(!tree.cap_truncated);
  CHECK(tree.duplicates_rejected == 0);

  // Count law: exactly 2^k nodes at depth k.
  ReverseTree deep = build_reverse_tree(builtin("simple"), Nat::of(1), 10);
  std::vector<std::uint64_t> per_depth(11, 0);
  for (const ReverseTreeNode& n : deep.nodes) ++per_depth[n.depth];
  for (std::uint32_t k = 0; k <= 10; ++k) {
    CHECK(per_depth[k] == (std::uint64_t{1} << k));
  }
}

TEST_CASE("pow2 children of the fixed point are the powers of two") {
  ReverseCaps caps;
  caps.value_cap = Nat::of(20);
  ReverseTree tree = build_reverse_tree(builtin("pow2"), Nat::of(0), 1, caps);
  std::vector<Nat> children;
  for (const ReverseTreeNode& n : tree.nodes) {
    if (n.depth == 1) children.push_back(n.value);
  }
  CHECK(children == nats({1, 2, 4, 8, 16}));
}

TEST_CASE("zero depth keeps only the root") {
  ReverseTree tree = build_reverse_tree(builtin("simple"), Nat::of(5), 0);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].value == Nat::of(5));
  CHECK(tree.nodes[0].frontier == Frontier::TruncatedByDepth);
}

TEST_CASE("tree depth equals forward distance to the root") {
  for (const char* name : {"simple", "collatz-reduced", "incr"}) {
    const SystemDef& sys = builtin(name);
    ReverseTree tree = build_reverse_tree(sys, *sys.fixed_point, 6);
    for (const ReverseTreeNode& n : tree.nodes) {
      TrajectoryRecord rec = trace(sys, n.value);
      REQUIRE_MESSAGE(rec.root.kind == RootKind::FixedPoint, name);
      CHECK_MESSAGE(rec.steps_to_root == n.depth, name, " value ", n.value.str());
    }
  }
}

TEST_CASE("eta profiles") {
  std::vector<Nat> hundred;
  for (std::uint64_t v = 1; v <= 100; ++v) hundred.push_back(Nat::of(v));
  EtaProfile simple = eta_profile(builtin("simple"), hundred);
  for (const EtaEntry& e : simple.entries) {
    CHECK(e.count == 2);
    CHECK(!e.unbounded_family);
    CHECK(!e.cap_truncated);
  }

  ReverseCaps cap20;
  cap20.value_cap = Nat::of(20);
  EtaProfile pow2 = eta_profile(builtin("pow2"), {Nat::of(3)}, cap20);
  REQUIRE(pow2.entries.size() == 1);
  CHECK(pow2.entries[0].count == 3);
  CHECK(pow2.entries[0].unbounded_family);
  // 3 + 2^mu steps back onto 3 exactly when 2^mu exceeds 3.
  CHECK(predecessors(builtin("pow2"), Nat::of(3), cap20).values == nats({7, 11, 19}));

  ReverseCaps mu12;
  mu12.param_cap = 12;
  EtaProfile reduced = eta_profile(builtin("collatz-reduced"), {Nat::of(1)}, mu12);
  CHECK(reduced.entries[0].count == 3);
  CHECK(reduced.entries[0].unbounded_family);
}

TEST_CASE("eta equals the predecessor list length under identical caps") {
  ReverseCaps caps;
  caps.param_cap = 16;
  caps.value_cap = Nat::of(100000);
  for (const char* name : {"simple", "collatz-reduced", "mp", "pow2"}) {
    const SystemDef& sys = builtin(name);
    std::vector<Nat> nodes;
    for (std::uint64_t v = 0; v <= 60; ++v) {
      if (admits(sys, Nat::of(v))) nodes.push_back(Nat::of(v));
    }
    EtaProfile profile = eta_profile(sys, nodes, caps);
    for (const EtaEntry& e : profile.entries) {
      CHECK(e.count == predecessors(sys, e.node, caps).values.size());
    }
  }
}

TEST_CASE("coverage partitions admitted values by tree membership") {
  CoverageResult full = coverage_check(builtin("simple"), Nat::of(1), Nat::of(15), 3);
  CHECK(full.uncovered.empty());
  CHECK(full.covered.size() == 15);

  CoverageResult short16 = coverage_check(builtin("simple"), Nat::of(1), Nat::of(16), 3);
  CHECK(short16.uncovered == nats({16}));

  // Forward-distance oracle: a value <= bound is covered exactly when its
  // trajectory reaches the root within the depth. The value cap bounds the
  // tree (reverse values grow exponentially) and clears every excursion of
  // the inspected seeds.
  const SystemDef& reduced = builtin("collatz-reduced");
  ReverseCaps caps;
  caps.value_cap = Nat::of(100000);
  CoverageResult cr = coverage_check(reduced, Nat::of(1), Nat::of(100), 20, caps);
  std::set<std::uint64_t> covered;
  for (Nat v : cr.covered) covered.insert(static_cast<std::uint64_t>(v.v));
  for (std::uint64_t v = 1; v <= 100; ++v) {
    if (!admits(reduced, Nat::of(v))) continue;
    TrajectoryRecord rec = trace(reduced, Nat::of(v));
    REQUIRE(rec.root.kind == RootKind::FixedPoint);
    bool within = rec.steps_to_root <= 20;
    CHECK_MESSAGE(covered.count(v) == (within ? 1u : 0u), "value ", v);
  }
}
