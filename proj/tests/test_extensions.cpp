#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "atcalc/canonical.hpp"
#include "atcalc/extensions.hpp"
#include "atcalc/gen.hpp"
#include "atcalc/metrics.hpp"
#include "atcalc/operad.hpp"
#include "atcalc/tree.hpp"

using namespace atcalc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// SAND(AND(a, b), c) anchored a, b, c: prepare both arms, then strike
AnchoredTree lockpick() {
  AttackTree t;
  NodeId a = t.add_bas("a");
  NodeId b = t.add_bas("b");
  NodeId c = t.add_bas("c");
  NodeId g = t.add_gate(GateType::kAnd, {a, b});
  t.add_gate(GateType::kSand, {g, c});
  return {std::move(t), {a, b, c}};
}

// SAND(a, a): the same step twice in sequence
AnchoredTree twice() {
  AttackTree t;
  NodeId a = t.add_bas("a");
  t.add_gate(GateType::kSand, {a, a});
  return {std::move(t), {a}};
}

// OR(SAND(b, c), AND(b, c)) with b and c shared between the branches
AnchoredTree race() {
  AttackTree t;
  NodeId b = t.add_bas("b");
  NodeId c = t.add_bas("c");
  NodeId s = t.add_gate(GateType::kSand, {b, c});
  NodeId g = t.add_gate(GateType::kAnd, {b, c});
  t.add_gate(GateType::kOr, {s, g});
  return {std::move(t), {b, c}};
}

// OR@p(C@p(a, C@o(b, c)), d) anchored a, b, c, d: attack a, countered by
// defense b, counter-countered by c; d is the uncontested fallback
AnchoredTree guarded() {
  AttackTree t;
  NodeId a = t.add_bas("a", Actor::kProponent);
  NodeId b = t.add_bas("b", Actor::kOpponent);
  NodeId c = t.add_bas("c", Actor::kProponent);
  NodeId d = t.add_bas("d", Actor::kProponent);
  NodeId c2 = t.add_gate(GateType::kCounter, {b, c}, "c2", Actor::kOpponent);
  NodeId c1 = t.add_gate(GateType::kCounter, {a, c2}, "c1", Actor::kProponent);
  t.add_gate(GateType::kOr, {c1, d}, "r", Actor::kProponent);
  return {std::move(t), {a, b, c, d}};
}

AnchoredTree sand_as_and(const AnchoredTree& at) {
  AttackTree t;
  for (NodeId v = 0; v < at.tree.size(); ++v) {
    const auto& n = at.tree.node(v);
    if (n.gate == GateType::kBas) {
      t.add_bas(n.name, n.actor);
    } else {
      GateType g = n.gate == GateType::kSand ? GateType::kAnd : n.gate;
      t.add_gate(g, {}, n.name, n.actor);
    }
  }
  for (NodeId v = 0; v < at.tree.size(); ++v)
    if (at.tree.node(v).gate != GateType::kBas)
      t.set_children(v, at.tree.node(v).children);
  return {std::move(t), at.anchor};
}

}  // namespace

TEST_CASE("mintime semiring") {
  DynamicSemiring mt = mintime_semiring();
  CHECK(mt.base.name == "mintime");
  CHECK(mt.base.nabla(3.0, 5.0) == 3.0);
  CHECK(mt.base.triangle(3.0, 5.0) == 5.0);
  CHECK(mt.one_lozenge == 0.0);
  std::vector<double> xs = {3.0, 5.0, 2.0};
  CHECK(mt.fold_lozenge(xs) == 10.0);
  CHECK(mt.fold_lozenge({}) == 0.0);

  std::mt19937 rng(50001);
  std::vector<std::string> bad = verify_dynamic_semiring(mt, rng, 500);
  std::string first = bad.empty() ? "" : bad.front();
  CHECK_MESSAGE(bad.empty(), first);
}

TEST_CASE("broken sequencing laws are reported") {
  std::mt19937 rng(50002);

  DynamicSemiring skew = mintime_semiring();
  skew.lozenge = [](double a, double b) { return a - b; };
  CHECK_FALSE(verify_dynamic_semiring(skew, rng, 500).empty());

  DynamicSemiring off = mintime_semiring();
  off.one_lozenge = 5.0;
  CHECK_FALSE(verify_dynamic_semiring(off, rng, 500).empty());

  DynamicSemiring base_off = mintime_semiring();
  base_off.base.one_nabla = 5.0;
  CHECK_FALSE(verify_dynamic_semiring(base_off, rng, 500).empty());
}

TEST_CASE("sequential attacks wait for the slowest preparation") {
  AnchoredTree at = lockpick();
  DynamicSemiring mt = mintime_semiring();
  std::vector<double> t = {3.0, 5.0, 2.0};
  CHECK(dat_bottom_up(at, mt, t) == 7.0);

  std::mt19937 rng(50003);
  std::uniform_int_distribution<> dur(0, 50);
  for (int i = 0; i < 100; ++i) {
    t = {(double)dur(rng), (double)dur(rng), (double)dur(rng)};
    CHECK(dat_bottom_up(at, mt, t) == std::max(t[0], t[1]) + t[2]);
  }

  BuTrace trace;
  t = {3.0, 5.0, 2.0};
  dat_bottom_up(at, mt, t, &trace);
  CHECK(trace.value[at.tree.root()] == 7.0);
  CHECK(trace.value[3] == 5.0);  // the AND gate
  CHECK(trace.order == at.tree.topo_order());
}

TEST_CASE("a SAND edge sequences its child once per edge") {
  AnchoredTree at = twice();
  DynamicSemiring mt = mintime_semiring();
  std::mt19937 rng(50004);
  std::uniform_int_distribution<> dur(0, 50);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> t = {(double)dur(rng)};
    CHECK(dat_bottom_up(at, mt, t) == 2.0 * t[0]);
  }
}

TEST_CASE("parallel always beats sequential on shared steps") {
  AnchoredTree at = race();
  DynamicSemiring mt = mintime_semiring();
  std::mt19937 rng(50005);
  std::uniform_int_distribution<> dur(0, 50);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> t = {(double)dur(rng), (double)dur(rng)};
    CHECK(dat_bottom_up(at, mt, t) == std::max(t[0], t[1]));
  }
}

TEST_CASE("sequencing by the AND operator collapses to plain bu") {
  DynamicSemiring seq_cost{semiring("mincost"),
                           [](double a, double b) { return a + b; }, 0.0};
  std::mt19937 rng(50006);
  GenOptions opt;
  opt.allow_sand = true;
  for (int i = 0; i < 50; ++i) {
    AnchoredTree t = random_dat(rng, opt);
    std::vector<double> x(t.arity());
    for (double& v : x) v = std::uniform_int_distribution<>(0, 20)(rng);
    CHECK(dat_bottom_up(t, seq_cost, x) ==
          eval_bottom_up_semiring(semiring("mincost"), sand_as_and(t), x));
  }
}

TEST_CASE("dynamic evaluation rejects counter gates and bad arity") {
  AnchoredTree adt = guarded();
  std::vector<double> x = {5.0, kInf, 2.0, 8.0};
  CHECK_THROWS_AS(dat_bottom_up(adt, mintime_semiring(), x),
                  std::invalid_argument);

  std::vector<double> two = {1.0, 2.0};
  CHECK_THROWS_AS(dat_bottom_up(lockpick(), mintime_semiring(), two),
                  std::invalid_argument);
}

TEST_CASE("dynamic composition preserves the sequence order") {
  AttackTree t;
  NodeId a = t.add_bas("a");
  NodeId b = t.add_bas("b");
  t.add_gate(GateType::kSand, {a, b});
  AnchoredTree seq{std::move(t), {a, b}};

  std::vector<AnchoredTree> parts;
  parts.push_back(prime_and(2));
  parts.push_back(id_tree());
  AnchoredTree composed = dat_compose(seq, parts);
  CHECK(validate_dat(composed.tree).empty());
  CHECK(canonical_form(composed) == canonical_form(lockpick()));

  // swapping the parts swaps the phases: a different dynamic tree
  std::vector<AnchoredTree> swapped;
  swapped.push_back(id_tree());
  swapped.push_back(prime_and(2));
  AnchoredTree other = dat_compose(seq, swapped);
  CHECK(canonical_form(other) != canonical_form(composed));
  std::vector<double> x = {3.0, 5.0, 2.0};
  CHECK(dat_bottom_up(other, mintime_semiring(), x) ==
        3.0 + std::max(5.0, 2.0));

  std::vector<AnchoredTree> just_seq;
  just_seq.push_back(seq);
  CHECK(canonical_form(dat_compose(id_tree(), just_seq)) ==
        canonical_form(seq));

  CHECK_THROWS_AS(dat_compose(guarded(), parts), std::invalid_argument);
}

TEST_CASE("dynamic evaluation is modular over composition") {
  std::mt19937 rng(50007);
  DynamicSemiring mt = mintime_semiring();
  GenOptions opt;
  opt.allow_sand = true;
  opt.min_bas = 2;
  opt.max_bas = 4;
  GenOptions small = opt;
  small.min_bas = 1;
  small.max_bas = 3;
  small.extra_gates = 0;
  for (int i = 0; i < 50; ++i) {
    AnchoredTree outer = random_dat(rng, opt);
    std::vector<AnchoredTree> parts;
    std::vector<double> x;
    std::vector<double> part_values;
    for (size_t j = 0; j < outer.arity(); ++j) {
      parts.push_back(random_dat(rng, small));
      std::vector<double> xs(parts.back().arity());
      for (double& v : xs) v = std::uniform_int_distribution<>(0, 20)(rng);
      part_values.push_back(dat_bottom_up(parts.back(), mt, xs));
      x.insert(x.end(), xs.begin(), xs.end());
    }
    AnchoredTree whole = dat_compose(outer, parts);
    CHECK(dat_bottom_up(whole, mt, x) ==
          dat_bottom_up(outer, mt, part_values));
  }
}

TEST_CASE("guarded attack values") {
  AnchoredTree at = guarded();
  CHECK(validate_adt(at.tree).empty());
  AttributeDomain dom = adt_mincost_domain();
  CHECK(dom.opponent_default == kInf);

  // defense b absent: counter it (2) after the base attack (5), beat 8
  std::vector<double> x = {5.0, kInf, 2.0, 8.0};
  CHECK(adt_bottom_up(at, dom, x) == 7.0);

  // no counter available either: fall back to d
  x = {5.0, kInf, kInf, 8.0};
  CHECK(adt_bottom_up(at, dom, x) == 8.0);

  // a zero-valued defense is free to step past: the left branch wins
  x = {5.0, 0.0, kInf, 8.0};
  CHECK(adt_bottom_up(at, dom, x) == 5.0);

  BuTrace trace;
  x = {5.0, kInf, 2.0, 8.0};
  adt_bottom_up(at, dom, x, &trace);
  CHECK(trace.value[4] == 2.0);  // C@o: the defense is countered
  CHECK(trace.value[5] == 7.0);  // C@p: attack plus counter-counter

  std::vector<double> three = {5.0, kInf, 2.0};
  CHECK_THROWS_AS(adt_bottom_up(at, dom, three), std::invalid_argument);
}

TEST_CASE("uncolored trees evaluate with proponent operators") {
  std::mt19937 rng(50008);
  AttributeDomain dom = adt_mincost_domain();
  for (int i = 0; i < 30; ++i) {
    AnchoredTree t = random_treelike(rng);
    std::vector<double> x(t.arity());
    for (double& v : x) v = std::uniform_int_distribution<>(0, 20)(rng);
    CHECK(adt_bottom_up(t, dom, x) ==
          eval_bottom_up_semiring(semiring("mincost"), t, x));
  }
}

TEST_CASE("two-colored composition checks the grafted color") {
  AnchoredTree at = guarded();
  AttributeDomain dom = adt_mincost_domain();

  // a proponent part onto the proponent BAS a: a is now OR(a1, a2)
  AttackTree p;
  NodeId a1 = p.add_bas("a1", Actor::kProponent);
  NodeId a2 = p.add_bas("a2", Actor::kProponent);
  p.add_gate(GateType::kOr, {a1, a2}, "alt", Actor::kProponent);
  AnchoredTree part{std::move(p), {a1, a2}};

  AnchoredTree grown = adt_compose(at, at.anchor[0], part);
  CHECK(validate_adt(grown.tree).empty());
  CHECK(grown.arity() == 5);
  std::vector<double> x = {4.0, 6.0, kInf, 2.0, 8.0};
  CHECK(adt_bottom_up(grown, dom, x) == 6.0);  // min(4,6) + 2

  // opponent-rooted part onto a proponent BAS: a color clash
  AttackTree o;
  NodeId b1 = o.add_bas("b1", Actor::kOpponent);
  NodeId b2 = o.add_bas("b2", Actor::kOpponent);
  o.add_gate(GateType::kAnd, {b1, b2}, "wall", Actor::kOpponent);
  AnchoredTree wall{std::move(o), {b1, b2}};
  CHECK_THROWS_AS(adt_compose(at, at.anchor[0], wall), std::invalid_argument);

  // the same part is fine on the opponent BAS b
  AnchoredTree fortified = adt_compose(at, at.anchor[1], wall);
  CHECK(validate_adt(fortified.tree).empty());
  // both wall halves impenetrable: counter the whole defense at cost 2
  std::vector<double> y = {5.0, kInf, kInf, 2.0, 8.0};
  CHECK(adt_bottom_up(fortified, dom, y) == 7.0);

  CHECK_THROWS_AS(adt_compose(at, at.tree.root(), part),
                  std::invalid_argument);
}

TEST_CASE("attribute evaluation is modular over composition") {
  std::mt19937 rng(50009);
  AttributeDomain dom = adt_mincost_domain();
  for (int i = 0; i < 50; ++i) {
    AnchoredTree outer = random_adt(rng);
    std::vector<int32_t> anchor_idx = outer.anchor_of_node();
    // pick one BAS and grow a same-colored random part there
    uint32_t pos =
        std::uniform_int_distribution<uint32_t>(0, (uint32_t)outer.arity() - 1)(
            rng);
    NodeId site = outer.anchor[pos];
    std::optional<Actor> color = outer.tree.node(site).actor;

    AnchoredTree part = random_adt(rng, 2);
    if (part.tree.node(part.tree.root()).actor != color) {
      // repaint the part to the site's color by flipping every node
      AttackTree flipped;
      for (NodeId v = 0; v < part.tree.size(); ++v) {
        const auto& n = part.tree.node(v);
        Actor swapped = n.actor == Actor::kOpponent ? Actor::kProponent
                                                    : Actor::kOpponent;
        if (n.gate == GateType::kBas) flipped.add_bas(n.name, swapped);
        else flipped.add_gate(n.gate, n.children, n.name, swapped);
      }
      part.tree = std::move(flipped);
    }

    AnchoredTree whole = adt_compose(outer, site, part);
    CHECK(validate_adt(whole.tree).empty());

    std::vector<double> part_x(part.arity());
    for (double& v : part_x) v = std::uniform_int_distribution<>(0, 20)(rng);
    double part_value = adt_bottom_up(part, dom, part_x);

    std::vector<double> outer_x(outer.arity());
    for (double& v : outer_x) v = std::uniform_int_distribution<>(0, 20)(rng);
    outer_x[pos] = part_value;

    // spliced layout: part values sit at the site's position
    std::vector<double> whole_x;
    for (uint32_t j = 0; j < pos; ++j) whole_x.push_back(outer_x[j]);
    whole_x.insert(whole_x.end(), part_x.begin(), part_x.end());
    for (uint32_t j = pos + 1; j < outer.arity(); ++j)
      whole_x.push_back(outer_x[j]);

    CHECK(adt_bottom_up(whole, dom, whole_x) ==
          adt_bottom_up(outer, dom, outer_x));
  }
}
