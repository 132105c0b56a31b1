#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <stdexcept>

#include "atcalc/gen.hpp"
#include "atcalc/tree.hpp"

using namespace atcalc;

namespace {

// r = OR(f, AND(b, l)), anchors (f, b, l)
AnchoredTree bank_tree() {
  AttackTree t;
  NodeId f = t.add_bas("f");
  NodeId b = t.add_bas("b");
  NodeId l = t.add_bas("l");
  NodeId s = t.add_gate(GateType::kAnd, {b, l}, "s");
  t.add_gate(GateType::kOr, {f, s}, "r");
  return {std::move(t), {f, b, l}};
}

}  // namespace

TEST_CASE("attack vectors pack and compare") {
  AttackVector b(3);
  CHECK(b.count() == 0);
  b.set(1, true);
  CHECK(b.get(1));
  CHECK_FALSE(b.get(0));
  CHECK(b.mask() == 2);
  CHECK(AttackVector::from_mask(3, 5).count() == 2);
  CHECK(AttackVector::from_mask(3, 7).dominates(AttackVector::from_mask(3, 5)));
  CHECK_FALSE(
      AttackVector::from_mask(3, 5).dominates(AttackVector::from_mask(3, 2)));
  CHECK_THROWS_AS(AttackVector::from_mask(2, 4), std::out_of_range);

  // spill past one word
  AttackVector wide(70);
  wide.set(69, true);
  wide.set(3, true);
  CHECK(wide.count() == 2);
  CHECK(wide.get(69));
  AttackVector wide2(70);
  wide2.set(3, true);
  CHECK(wide.dominates(wide2));
  CHECK_FALSE(wide2.dominates(wide));
}

TEST_CASE("validation catches the structural invariants") {
  SUBCASE("valid tree passes") {
    CHECK(validate(bank_tree()).empty());
  }
  SUBCASE("childless gate violates BAS-iff-leaf") {
    AttackTree t;
    NodeId a = t.add_bas("a");
    NodeId g = t.add_gate(GateType::kOr, {}, "g");
    t.add_gate(GateType::kOr, {a, g}, "r");
    CHECK_FALSE(validate(t).empty());
  }
  SUBCASE("two roots") {
    AttackTree t;
    NodeId a = t.add_bas("a");
    t.add_gate(GateType::kOr, {a}, "r1");
    t.add_gate(GateType::kOr, {a}, "r2");
    auto v = validate(t);
    CHECK_FALSE(v.empty());
    CHECK_THROWS_AS(t.root(), std::logic_error);
  }
  SUBCASE("SAND and actors rejected in plain trees") {
    AttackTree t;
    NodeId a = t.add_bas("a");
    NodeId b = t.add_bas("b");
    t.add_gate(GateType::kSand, {a, b}, "r");
    CHECK_FALSE(validate(t).empty());
    CHECK(validate_dat(t).empty());
  }
  SUBCASE("anchor must be a bijection") {
    AnchoredTree at = bank_tree();
    at.anchor.pop_back();
    CHECK_FALSE(validate(at).empty());
    at = bank_tree();
    at.anchor[0] = at.anchor[1];
    CHECK_FALSE(validate(at).empty());
  }
}

TEST_CASE("parallel edges are legal and counted") {
  AttackTree t;
  NodeId a = t.add_bas("a");
  t.add_gate(GateType::kOr, {a, a}, "r");
  CHECK(validate(t).empty());
  CHECK(t.in_degrees()[a] == 2);
}

TEST_CASE("topo order puts children first") {
  AnchoredTree at = bank_tree();
  auto topo = at.tree.topo_order();
  std::vector<size_t> pos(at.tree.size());
  for (size_t i = 0; i < topo.size(); ++i) pos[topo[i]] = i;
  for (NodeId v = 0; v < at.tree.size(); ++v)
    for (NodeId c : at.tree.node(v).children) CHECK(pos[c] < pos[v]);
}

TEST_CASE("structure function on the bank tree") {
  AnchoredTree at = bank_tree();
  NodeId root = at.tree.root();
  // f alone succeeds
  CHECK(structure_function(at, AttackVector::from_mask(3, 0b001), root));
  // b alone does not
  CHECK_FALSE(structure_function(at, AttackVector::from_mask(3, 0b010), root));
  // b and l together do
  CHECK(structure_function(at, AttackVector::from_mask(3, 0b110), root));
  CHECK_FALSE(structure_function(at, AttackVector::from_mask(3, 0), root));
}

TEST_CASE("minimal attacks of the bank tree") {
  AnchoredTree at = bank_tree();
  auto min_attacks = minimal_attacks(at);
  std::set<uint64_t> masks;
  for (const auto& b : min_attacks) masks.insert(b.mask());
  CHECK(masks == std::set<uint64_t>{0b001, 0b110});
}

TEST_CASE("success table is monotone on random DAGs") {
  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    AnchoredTree at = random_dag(rng);
    auto table = success_table(at);
    uint32_t n = (uint32_t)at.arity();
    for (uint64_t m = 0; m < table.size(); ++m)
      for (uint32_t j = 0; j < n; ++j)
        if (!((m >> j) & 1) && table[m]) CHECK(table[m | (1ull << j)]);
    // all-on succeeds, all-off fails (structure functions are nonconstant)
    CHECK(table.back());
    CHECK_FALSE(table.front());
  }
}

TEST_CASE("parallel edges collapse in the structure function") {
  AttackTree t;
  NodeId a = t.add_bas("a");
  NodeId g = t.add_gate(GateType::kAnd, {a, a}, "g");
  t.add_gate(GateType::kOr, {g}, "r");
  AnchoredTree at{std::move(t), {a}};
  CHECK(structure_function(at, AttackVector::from_mask(1, 1), at.tree.root()));
  CHECK_FALSE(
      structure_function(at, AttackVector::from_mask(1, 0), at.tree.root()));
}

TEST_CASE("enumeration cap throws length_error") {
  std::mt19937 rng(3);
  GenOptions opt;
  opt.min_bas = 6;
  opt.max_bas = 6;
  AnchoredTree at = random_treelike(rng, opt);
  CHECK_THROWS_AS(success_table(at, 5), std::length_error);
}

TEST_CASE("generators emit valid trees") {
  std::mt19937 rng(99);
  for (int i = 0; i < 100; ++i) {
    CHECK(validate(random_treelike(rng)).empty());
    CHECK(validate(random_dag(rng)).empty());
    CHECK(validate(random_dat(rng)).empty());
    CHECK(validate(random_adt(rng)).empty());
  }
}
