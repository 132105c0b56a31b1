#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "atcalc/semiring.hpp"
#include "atcalc/tree.hpp"

namespace atcalc {

// Truth table of a Boolean function of n <= 6 variables; bit m of `bits` is
// the value at the activation whose bit i (LSB first) is variable i.
struct TruthTable {
  uint32_t n = 0;
  uint64_t bits = 0;

  static TruthTable constant(uint32_t n, bool value);
  uint64_t rows() const { return uint64_t{1} << n; }
  bool value(uint64_t mask) const { return (bits >> mask) & 1; }
  bool is_monotone() const;
  bool is_constant() const;

  friend bool operator==(const TruthTable&, const TruthTable&) = default;
};

// All monotone functions of exactly n variables (n <= 4), truth-table order.
// Sizes: 2, 3, 6, 20, 168 for n = 0..4.
std::vector<TruthTable> monotone_functions(uint32_t n);

// delta f: fresh ignored first variable. Same diagram shape, one more level.
TruthTable tt_delta(const TruthTable& f);
// Sh(f0,f1)(x1..xn) = f0(x2..) or (x1 and f1(x2..)).
TruthTable tt_shannon(const TruthTable& f0, const TruthTable& f1);
// pointwise f0 <= f1
bool tt_below(const TruthTable& f0, const TruthTable& f1);

// Reduced ordered BDD as an immutable frozen table. Index 0/1 are the
// terminals; internal nodes follow in DFS postorder from the root (lo branch
// first, children before parents), so the table is identical for identical
// functions and plain vector equality is semantic equality at fixed variable
// count. The root is the last entry unless the function is constant.
// Variables are levels 0..var_count-1 from the top.
class Robdd {
 public:
  struct Node {
    uint32_t level;
    uint32_t lo;  // child when the level's variable is 0
    uint32_t hi;
    friend bool operator==(const Node&, const Node&) = default;
  };

  static Robdd constant(uint32_t var_count, bool value);

  uint32_t var_count() const { return var_count_; }
  uint32_t root() const { return root_; }
  const std::vector<Node>& table() const { return table_; }
  size_t internal_nodes() const { return table_.size() - 2; }
  bool constant_value(bool* out) const;  // true when the function is constant

  // b indexed by level
  bool evaluate(const AttackVector& b) const;

  friend bool operator==(const Robdd&, const Robdd&) = default;

  // Ordering/reduction/canonicity violations; empty for a healthy diagram.
  std::vector<std::string> check() const;

  std::string to_dot(std::span<const std::string> level_names = {}) const;

 private:
  friend class BddBuilder;
  uint32_t var_count_ = 0;
  uint32_t root_ = 0;
  std::vector<Node> table_;
};

// Maps anchor index -> level. The default order keeps anchor order.
struct VarOrder {
  std::vector<uint32_t> anchor_to_level;
  static VarOrder identity(uint32_t n);
  std::vector<uint32_t> level_to_anchor() const;
  void check() const;  // throws unless a permutation
};

// Bottom-up construction over the tree: BAS becomes its level's variable,
// OR/AND combine children with hash-consed apply. Same function + same
// order = same table, whatever the tree looked like.
Robdd build_robdd(const AnchoredTree& at, const VarOrder& order);
inline Robdd build_robdd(const AnchoredTree& at) {
  return build_robdd(at, VarOrder::identity((uint32_t)at.arity()));
}

Robdd robdd_from_truth_table(const TruthTable& tt);
TruthTable truth_table(const Robdd& b);  // var_count <= 6

// One g-step per diagram node: terminals map to z0/z1, a level-i node with
// child values (q, r) maps to g(x[i], q, r). Linear in the table size.
struct BddTrace {
  struct Entry { uint32_t index; uint32_t level; double value; };
  std::vector<Entry> entries;  // children before parents
};
double bdd_bu(const Robdd& b, const std::function<double(double, double, double)>& g,
              double z0, double z1, std::span<const double> x_by_level,
              BddTrace* trace = nullptr);

struct BddPlugin {
  std::string name;
  std::function<double(double, double, double)> g;
  double z0 = 0.0, z1 = 0.0;
};

// g(p,q,r) = (1-p)q + pr with terminals 0 and 1: attack probability.
BddPlugin tap_plugin();
// g(x,y,z) = y nabla (x triangle z) with terminals (one_nabla, one_triangle).
// Requires both identities and absorption; throws std::invalid_argument
// otherwise (without absorption the node-local step overcounts).
BddPlugin semiring_plugin(const Semiring& s);

// Convenience: build + evaluate. x is indexed by anchor; the order maps it
// onto levels. Reports the diagram size through `size_out` when non-null.
double bdd_metric(const AnchoredTree& at, const BddPlugin& plugin,
                  std::span<const double> x, const VarOrder& order,
                  size_t* size_out = nullptr, BddTrace* trace = nullptr);

// Structure-only operations used by the correctness characterization.
Robdd delta_expand(const Robdd& f);            // ignored fresh top variable
Robdd shannon_compose(const Robdd& f0, const Robdd& f1);  // needs f0 < f1
// top-variable cofactors (restrict level 0, shift the rest down)
std::pair<Robdd, Robdd> cofactors(const Robdd& f);
// pointwise f0 <= f1, via f0 AND NOT f1 == empty
bool precede(const Robdd& f0, const Robdd& f1);

// Checks a candidate diagram evaluator psi-hat against the conditions that
// pin down "computes metric phi on every diagram": terminal values,
// invariance under an ignored variable, and the g-decomposition at a
// Shannon step, over all monotone functions of < n_max variables (n_max <=
// 4) with `samples` random value vectors per instance.
struct PsiReport {
  int functions_checked = 0;
  int pairs_checked = 0;
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};
PsiReport check_psi_conditions(
    const std::function<double(const TruthTable&, std::span<const double>)>& psi,
    const std::function<double(double, double, double)>& g, double z0,
    double z1, uint32_t n_max, std::mt19937& rng, int samples,
    const std::function<double(std::mt19937&)>& sample_value, double tol);

// DNF-shaped tree realizing a monotone nonconstant truth table: OR over the
// minimal true points, AND over each point's variables, with absorbed
// padding disjuncts so every variable occurs. Witnesses that the structure
// metric reaches all of MBool^nc.
AnchoredTree at_from_monotone(const TruthTable& tt);

}  // namespace atcalc
