#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "atcalc/semiring.hpp"
#include "atcalc/tree.hpp"

namespace atcalc {

// A security metric packaged with the operator family the bottom-up
// algorithm folds at OR and AND nodes: or_op(x_1..x_k) is the metric of the
// k-ary prime OR tree, and_op of the prime AND tree. `eval` is the metric's
// defining (enumeration-based) value; for the bottom-up semiring family the
// recursion itself is the definition, and eval computes exactly that.
struct MetricEvaluator {
  std::string name;
  std::function<double(const AnchoredTree&, std::span<const double>)> eval;
  std::function<double(std::span<const double>)> or_op;
  std::function<double(std::span<const double>)> and_op;
  // defined through Suc_T / minimal attacks rather than a tree recursion
  bool is_propositional = false;
  // claimed invariant under BAS merging (checked, not trusted, by the
  // scoperad-morphism sampler)
  bool merge_invariant = false;
  double tolerance = 0.0;  // comparison slack; 0 = exact
  std::function<double(std::mt19937&)> sample_value;
};

// Boolean structure metric: phi^struc(T)(b) = f_T(b).
bool eval_structure_metric(const AnchoredTree& at, const AttackVector& b);

// Attack-probability under independent BAS successes:
// sum over successful activations of prod p_i^{b_i} (1-p_i)^{1-b_i}.
// Requires p_i in [0,1]; enumeration capped at `cap` BASs.
double eval_tap(const AnchoredTree& at, std::span<const double> p,
                uint32_t cap = kDefaultEnumCap);

// Propositional semiring metric: nabla over minimal attacks of the triangle
// over the activated BASs' values.
double eval_propositional_semiring(const Semiring& s, const AnchoredTree& at,
                                   std::span<const double> x,
                                   uint32_t cap = kDefaultEnumCap);

// Bottom-up semiring metric: BAS reads its value, OR folds nabla and AND
// folds triangle over the child multiset (a parallel edge contributes its
// child's value once per edge). On DAGs this is a different metric from the
// propositional one.
double eval_bottom_up_semiring(const Semiring& s, const AnchoredTree& at,
                               std::span<const double> x);

MetricEvaluator make_propositional_metric(const Semiring& s,
                                          uint32_t cap = kDefaultEnumCap);
MetricEvaluator make_bottom_up_metric(const Semiring& s);
MetricEvaluator make_tap_metric(uint32_t cap = kDefaultEnumCap);
MetricEvaluator make_struct_metric();

// The metrics the command-line tool exposes by name: mincost, minskill,
// sat, maxdamage (propositional semiring metrics), tap and struct.
const std::vector<MetricEvaluator>& metric_registry();
const MetricEvaluator& metric(const std::string& name);  // throws if unknown

}  // namespace atcalc
