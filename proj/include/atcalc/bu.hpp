#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "atcalc/gen.hpp"
#include "atcalc/metrics.hpp"
#include "atcalc/operad.hpp"
#include "atcalc/tree.hpp"

namespace atcalc {

struct BuTrace {
  std::vector<NodeId> order;   // evaluation order (children first)
  std::vector<double> value;   // per node id
};

// Bottom-up metric evaluation: BAS i reads x[i], OR applies the metric's
// or_op and AND its and_op to the child multiset (one operand per edge).
// Every node is computed once, so the run performs exactly one operator
// application per gate over |edges| operands in total. On treelike trees
// this equals the metric's defining value; on DAGs it is its own (cheaper,
// generally different) quantity.
double bu(const AnchoredTree& at, const MetricEvaluator& m,
          std::span<const double> x, BuTrace* trace = nullptr);

// Every non-root node has exactly one incoming edge (multiplicity counted).
bool is_treelike(const AttackTree& t);

struct MetricCheck {
  struct Failure {
    AnchoredTree tree;
    std::vector<double> x;
    double lhs = 0.0, rhs = 0.0;
    std::string detail;
  };
  int samples_run = 0;
  std::vector<Failure> failures;
  bool passed() const { return failures.empty(); }
  std::string summary() const;
};

// Samples random treelike trees and checks bu == m.eval on each. A clean
// report means no counterexample was found in `samples` samples, not a
// proof.
MetricCheck check_treelike_theorem(const MetricEvaluator& m, int samples,
                                   std::mt19937& rng,
                                   const GenOptions& opt = {});

// Samples (T, sigma, x) with T treelike and sigma a proper surjection and
// compares m.eval(tau(sigma,T))(x) against m.eval(T)(sigma*x): equality for
// all sigma is the morphism condition under which bottom-up evaluation is
// exact on every DAG. Each recorded failure carries the implied concrete
// bu-vs-eval mismatch on tau(sigma,T) in `detail` (cross-checked before
// recording); if all samples pass, bu == m.eval is additionally spot-checked
// on random DAGs and any mismatch there is reported as a failure too.
MetricCheck check_scoperad_morphism(const MetricEvaluator& m, int samples,
                                    std::mt19937& rng,
                                    const GenOptions& opt = {});

}  // namespace atcalc
