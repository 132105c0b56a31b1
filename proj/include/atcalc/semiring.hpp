#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace atcalc {

// Carrier values are doubles throughout: booleans as 0/1, extended reals
// with the IEEE infinity as the explicit top element (min(inf, x) == x and
// inf + x == inf hold natively). Property checks draw integer-valued samples
// so that sums stay exact and equalities can be tested without tolerance.
enum class Carrier : uint8_t { kBoolean, kExtendedReal };

// Commutative double semiring (X, nabla, triangle): nabla combines
// alternative attacks (OR), triangle combines joint steps (AND), and
// triangle distributes over nabla. Identities are optional; empty folds
// require them.
struct Semiring {
  std::string name;
  Carrier carrier = Carrier::kExtendedReal;
  std::function<double(double, double)> nabla;
  std::function<double(double, double)> triangle;
  std::optional<double> one_nabla;     // unit of nabla
  std::optional<double> one_triangle;  // unit of triangle
  bool idempotent_nabla = false;
  bool idempotent_triangle = false;
  // x nabla (x triangle y) == x; required by the decision-diagram plugin
  bool absorbing = false;
  std::function<double(std::mt19937&)> sample;  // law-check value generator

  double fold_nabla(std::span<const double> xs) const;
  double fold_triangle(std::span<const double> xs) const;
};

// min-cost (min,+), min-skill (min,max), satisfiability (or,and) and
// max-damage (max,+); max-damage is the one without absorption.
const std::vector<Semiring>& builtin_semirings();
const Semiring& semiring(const std::string& name);  // throws if unknown

// Samples the stated laws (commutativity, associativity, identities,
// distributivity, idempotency and absorption as flagged) on random triples;
// returns human-readable violations, empty when everything holds.
std::vector<std::string> verify_semiring(const Semiring& s, std::mt19937& rng,
                                         int samples = 1000);

}  // namespace atcalc
