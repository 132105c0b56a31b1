#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "atcalc/bu.hpp"
#include "atcalc/operad.hpp"
#include "atcalc/semiring.hpp"
#include "atcalc/tree.hpp"

namespace atcalc {

// Semiring plus a third, sequencing operator for SAND gates. The sequencing
// op need not be commutative; SAND folds it over the children in their
// stored order.
struct DynamicSemiring {
  Semiring base;
  std::function<double(double, double)> lozenge;
  std::optional<double> one_lozenge;

  double fold_lozenge(std::span<const double> xs) const;
};

// min-time: (min, max, +) on [0, inf]. OR picks the fastest option, AND
// waits for the slowest parallel branch, SAND adds up the sequence.
DynamicSemiring mintime_semiring();

// Base semiring laws plus associativity/identity of the sequencing op,
// checked on random samples. Empty result = nothing falsified.
std::vector<std::string> verify_dynamic_semiring(const DynamicSemiring& d,
                                                 std::mt19937& rng,
                                                 int samples = 1000);

// Bottom-up metric on a dynamic tree: OR/AND as in `bu`, SAND folds the
// sequencing op left-to-right over its (ordered) children, one operand per
// edge. With lozenge == triangle this collapses to plain bu on the tree
// with SAND read as AND.
double dat_bottom_up(const AnchoredTree& at, const DynamicSemiring& d,
                     std::span<const double> x, BuTrace* trace = nullptr);

// star for dynamic trees: child order (and with it every SAND sequence) is
// preserved, so a grafted root takes exactly the slot of the BAS it
// replaces. Counter gates are rejected.
AnchoredTree dat_compose(const AnchoredTree& t,
                         std::span<const AnchoredTree> parts);

// One OR/AND op pair per color, plus a counter op per color combining a C
// gate's own-color child with the opposing child (own-color first).
struct AttributeDomain {
  std::string name;
  std::function<double(double, double)> nabla_p, triangle_p, box_p;
  std::function<double(double, double)> nabla_o, triangle_o, box_o;
  // value assumed for opponent BASs the caller leaves unassigned
  std::optional<double> opponent_default;
};

// Cheapest successful proponent play on [0, inf]:
// (min, +, +, +, min, min), opponent BASs default to inf.
AttributeDomain adt_mincost_domain();

// Bottom-up attribute evaluation on an attack-defense tree: the op at a
// node is chosen by its gate AND its color; x assigns a value to every BAS
// of either color, indexed by anchor.
double adt_bottom_up(const AnchoredTree& at, const AttributeDomain& dom,
                     std::span<const double> x, BuTrace* trace = nullptr);

// Substitute one BAS of an attack-defense tree by a whole one. The grafted
// root must carry the same color as the BAS it replaces; anything else is a
// type error in the two-colored composition and throws.
AnchoredTree adt_compose(const AnchoredTree& t, NodeId bas,
                         const AnchoredTree& part);

}  // namespace atcalc
