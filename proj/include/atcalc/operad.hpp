#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "atcalc/tree.hpp"

namespace atcalc {

// A surjection [n] ->> [m] over 0-based indices. Bijections are the special
// case n == m; those act on anchors as pure re-indexings, while proper
// surjections merge BASs.
struct Surjection {
  uint32_t source_arity = 0;
  uint32_t target_arity = 0;
  std::vector<uint32_t> map;  // size source_arity, values < target_arity

  static Surjection identity(uint32_t n);
  // Builds from the image list; target arity = max + 1. Throws if not onto.
  static Surjection from_map(std::vector<uint32_t> map);

  bool is_bijection() const { return source_arity == target_arity; }
  uint32_t operator()(uint32_t i) const { return map.at(i); }
  void check() const;  // throws std::invalid_argument unless onto

  // outer(inner(i)): inner [n]->>[k], outer [k]->>[m].
  static Surjection compose(const Surjection& outer, const Surjection& inner);

  // Acts blockwise: block i of size source[i].source_arity maps through
  // sigmas[i] into block i of the target sizes. Used by the operad
  // compatibility law between composition and re-indexing.
  static Surjection block_sum(std::span<const Surjection> sigmas);

  // For a bijection sigma on [n] and part arities m[0..n), the permutation
  // sending position k of block sigma(j) (blocks laid out in j order) to
  // position k of block sigma(j) in the original layout. This is the outer
  // re-indexing that relates tau(sigma, f) * (g_1..g_n) to
  // f * (g_sigma(1)..g_sigma(n)).
  static Surjection block_permutation(const Surjection& sigma,
                                      std::span<const uint32_t> arities);
};

// sigma acting on a value vector: result[i] = x[sigma(i)].
std::vector<double> pull_values(const Surjection& sigma,
                                std::span<const double> x);

// The one-BAS identity tree and the prime trees: a single OR (resp. AND)
// over k distinct BASs anchored left to right.
AnchoredTree id_tree();
AnchoredTree prime_or(uint32_t k);
AnchoredTree prime_and(uint32_t k);

// T[part/bas]: removes the BAS, grafts part, redirects the edges that ended
// in the BAS to part's root. Anchors: part's indices are spliced in at the
// removed BAS's position, later indices shift up. Node ids are re-issued
// densely, outer nodes first, then the part's.
AnchoredTree substitute(const AnchoredTree& t, NodeId bas,
                        const AnchoredTree& part);

// Simultaneous grafting t * (parts[0], ..., parts[n-1]): the BAS with anchor
// index i is replaced by parts[i], and parts keep their internal anchor
// order with the arities of earlier parts as offset.
AnchoredTree star(const AnchoredTree& t, std::span<const AnchoredTree> parts);

// Re-anchoring. For a bijection the tree is untouched and anchor indices map
// through sigma; for a proper surjection the BASs with equal images merge
// into one (which can create parallel edges).
AnchoredTree tau(const Surjection& sigma, const AnchoredTree& t);

// Expression tree over the prime generators: every anchored attack tree is
// id, a prime, a star composite, or a re-indexing of a smaller expression.
struct PrimeDecomposition {
  enum class Kind : uint8_t { kId, kOr, kAnd, kStar, kTau };
  struct Expr {
    Kind kind;
    uint32_t prime_arity = 0;          // kOr/kAnd
    Surjection sigma;                  // kTau
    std::vector<uint32_t> children;    // kStar: outer then parts; kTau: one
  };
  std::vector<Expr> exprs;
  uint32_t root = 0;

  size_t star_count() const;
  size_t tau_count() const;
};

// Factors the tree over the generators following the constructive induction:
// a single-gate tree is a merge of a prime, a gate whose BAS children belong
// to it alone splits off as a module, and otherwise some shared BAS is split
// into per-edge copies that a surjection re-merges. Terminates because each
// step lowers (non-BAS count, shared-BAS count) lexicographically.
PrimeDecomposition prime_decompose(const AnchoredTree& t);

AnchoredTree eval_decomposition(const PrimeDecomposition& d);

// Parenthesized text: id, or3, and2, star(f, g1, ..., gn),
// tau([2,1,1], f) with 1-based image entries.
std::string to_string(const PrimeDecomposition& d);

}  // namespace atcalc
