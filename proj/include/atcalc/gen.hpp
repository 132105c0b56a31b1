#pragma once

#include <random>

#include "atcalc/operad.hpp"
#include "atcalc/tree.hpp"

namespace atcalc {

// Seeded random tree generation for property checks. All generators are
// deterministic functions of the engine state.
struct GenOptions {
  uint32_t min_bas = 2;
  uint32_t max_bas = 8;
  uint32_t max_gate_arity = 4;
  uint32_t extra_gates = 3;        // DAG: sharing gates beyond the minimum
  double parallel_edge_prob = 0.15;
  bool allow_sand = false;
};

// Every non-root node has exactly one incoming edge.
AnchoredTree random_treelike(std::mt19937& rng, const GenOptions& opt = {});

// General DAG: gates may share children and carry parallel edges.
AnchoredTree random_dag(std::mt19937& rng, const GenOptions& opt = {});

// DAG with SAND gates mixed in (a dynamic attack tree).
AnchoredTree random_dat(std::mt19937& rng, GenOptions opt = {});

// Small attack-defense tree with consistent actors and C gates.
AnchoredTree random_adt(std::mt19937& rng, uint32_t max_depth = 3);

// Uniform-ish surjection [n] ->> [m], m <= n.
Surjection random_surjection(std::mt19937& rng, uint32_t n, uint32_t m);

// Random bijection on [n].
Surjection random_permutation(std::mt19937& rng, uint32_t n);

}  // namespace atcalc
