#include "atcalc/bdd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace atcalc {

TruthTable TruthTable::constant(uint32_t n, bool value) {
  if (n > 6) throw std::length_error("TruthTable: more than 6 variables");
  TruthTable t{n, 0};
  if (value)
    t.bits = n == 6 ? ~uint64_t{0} : (uint64_t{1} << (uint64_t{1} << n)) - 1;
  return t;
}

bool TruthTable::is_monotone() const {
  for (uint64_t m = 0; m < rows(); ++m)
    for (uint32_t i = 0; i < n; ++i)
      if (!((m >> i) & 1) && value(m) && !value(m | (uint64_t{1} << i)))
        return false;
  return true;
}

bool TruthTable::is_constant() const {
  return bits == 0 || *this == constant(n, true);
}

std::vector<TruthTable> monotone_functions(uint32_t n) {
  if (n > 4)
    throw std::length_error("monotone_functions: enumeration capped at 4");
  std::vector<TruthTable> out;
  uint64_t rows = uint64_t{1} << n;
  for (uint64_t bits = 0; bits < (uint64_t{1} << rows); ++bits) {
    TruthTable t{n, bits};
    if (t.is_monotone()) out.push_back(t);
  }
  return out;
}

TruthTable tt_delta(const TruthTable& f) {
  TruthTable t{f.n + 1, 0};
  for (uint64_t m = 0; m < t.rows(); ++m)
    if (f.value(m >> 1)) t.bits |= uint64_t{1} << m;
  return t;
}

TruthTable tt_shannon(const TruthTable& f0, const TruthTable& f1) {
  if (f0.n != f1.n)
    throw std::invalid_argument("tt_shannon: variable count mismatch");
  TruthTable t{f0.n + 1, 0};
  for (uint64_t m = 0; m < t.rows(); ++m)
    if ((m & 1) ? f1.value(m >> 1) : f0.value(m >> 1))
      t.bits |= uint64_t{1} << m;
  return t;
}

bool tt_below(const TruthTable& f0, const TruthTable& f1) {
  if (f0.n != f1.n)
    throw std::invalid_argument("tt_below: variable count mismatch");
  return (f0.bits & ~f1.bits) == 0;
}

// ---------------------------------------------------------------------------
// Mutable hash-consed node store used while constructing diagrams. Nodes are
// unique by (level, lo, hi) and never redundant (lo == hi collapses), so any
// ref is a reduced ordered diagram. Apply results are memoized per
// (op, a, b).
class BddBuilder {
 public:
  static constexpr uint32_t kZero = 0;
  static constexpr uint32_t kOne = 1;
  enum class Op : uint32_t { kOr, kAnd, kDiff };

  explicit BddBuilder(uint32_t levels) : levels_(levels) {
    nodes_.push_back({levels, 0, 0});
    nodes_.push_back({levels, 1, 1});
  }

  uint32_t make(uint32_t level, uint32_t lo, uint32_t hi) {
    if (lo == hi) return lo;
    uint64_t key = pack(level, lo, hi);
    auto [it, fresh] = unique_.try_emplace(key, (uint32_t)nodes_.size());
    if (fresh) {
      if (nodes_.size() >= (1u << 24))
        throw std::length_error("bdd: node store overflow");
      nodes_.push_back({level, lo, hi});
    }
    return it->second;
  }

  uint32_t var(uint32_t level) { return make(level, kZero, kOne); }

  uint32_t apply(Op op, uint32_t a, uint32_t b) {
    switch (op) {
      case Op::kOr:
        if (a == kOne || b == kOne) return kOne;
        if (a == kZero) return b;
        if (b == kZero) return a;
        if (a == b) return a;
        if (a > b) std::swap(a, b);
        break;
      case Op::kAnd:
        if (a == kZero || b == kZero) return kZero;
        if (a == kOne) return b;
        if (b == kOne) return a;
        if (a == b) return a;
        if (a > b) std::swap(a, b);
        break;
      case Op::kDiff:  // a and not b
        if (a == kZero || b == kOne || a == b) return kZero;
        if (b == kZero) return a;
        break;
    }
    uint64_t key = pack(static_cast<uint32_t>(op), a, b) | (uint64_t{1} << 63);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    uint32_t la = nodes_[a].level, lb = nodes_[b].level;
    uint32_t l = std::min(la, lb);
    uint32_t r = make(l,
                      apply(op, la == l ? nodes_[a].lo : a,
                            lb == l ? nodes_[b].lo : b),
                      apply(op, la == l ? nodes_[a].hi : a,
                            lb == l ? nodes_[b].hi : b));
    cache_.emplace(key, r);
    return r;
  }

  // Copies another frozen diagram into this store with its levels shifted.
  uint32_t import(const Robdd& src, int level_shift) {
    std::vector<uint32_t> remap(src.table().size());
    remap[0] = kZero;
    remap[1] = kOne;
    // frozen tables are postordered (children before parents)
    for (uint32_t i = 2; i < src.table().size(); ++i) {
      const auto& n = src.table()[i];
      remap[i] = make(static_cast<uint32_t>((int)n.level + level_shift),
                      remap[n.lo], remap[n.hi]);
    }
    return remap[src.root()];
  }

  // Canonical immutable table: terminals then internals in DFS postorder
  // from the root, lo branch first, so children precede parents.
  Robdd freeze(uint32_t root) const {
    Robdd out;
    out.var_count_ = levels_;
    out.table_.push_back({levels_, 0, 0});
    out.table_.push_back({levels_, 1, 1});
    std::unordered_map<uint32_t, uint32_t> remap{{kZero, 0}, {kOne, 1}};
    // stack entries: (ref, children already expanded?)
    std::vector<std::pair<uint32_t, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [r, expanded] = stack.back();
      stack.pop_back();
      if (remap.count(r)) continue;
      if (expanded) {
        remap.emplace(r, (uint32_t)out.table_.size());
        out.table_.push_back(
            {nodes_[r].level, remap.at(nodes_[r].lo), remap.at(nodes_[r].hi)});
        continue;
      }
      stack.push_back({r, true});
      stack.push_back({nodes_[r].hi, false});
      stack.push_back({nodes_[r].lo, false});
    }
    out.root_ = remap.at(root);
    return out;
  }

 private:
  static uint64_t pack(uint32_t a, uint32_t b, uint32_t c) {
    return (uint64_t(a) << 48) ^ (uint64_t(b) << 24) ^ uint64_t(c);
  }

  uint32_t levels_;
  std::vector<Robdd::Node> nodes_;
  std::unordered_map<uint64_t, uint32_t> unique_;
  std::unordered_map<uint64_t, uint32_t> cache_;
};

Robdd Robdd::constant(uint32_t var_count, bool value) {
  BddBuilder b(var_count);
  return b.freeze(value ? BddBuilder::kOne : BddBuilder::kZero);
}

bool Robdd::constant_value(bool* out) const {
  if (root_ > 1) return false;
  if (out) *out = root_ == 1;
  return true;
}

bool Robdd::evaluate(const AttackVector& b) const {
  if (b.size() != var_count_)
    throw std::invalid_argument("Robdd::evaluate: vector arity mismatch");
  uint32_t r = root_;
  while (r > 1) r = b.get(table_[r].level) ? table_[r].hi : table_[r].lo;
  return r == 1;
}

std::vector<std::string> Robdd::check() const {
  std::vector<std::string> bad;
  if (table_.size() < 2 || root_ >= table_.size()) {
    bad.push_back("malformed table");
    return bad;
  }
  if (table_[0] != Node{var_count_, 0, 0} || table_[1] != Node{var_count_, 1, 1})
    bad.push_back("terminal rows not canonical");
  std::unordered_map<uint64_t, uint32_t> seen;
  std::vector<bool> referenced(table_.size(), false);
  referenced[root_] = true;
  for (uint32_t i = 2; i < table_.size(); ++i) {
    const Node& n = table_[i];
    if (n.level >= var_count_)
      bad.push_back("node " + std::to_string(i) + ": level out of range");
    if (n.lo >= table_.size() || n.hi >= table_.size()) {
      bad.push_back("node " + std::to_string(i) + ": child out of range");
      continue;
    }
    if (n.lo == n.hi)
      bad.push_back("node " + std::to_string(i) + ": redundant (lo == hi)");
    if (n.lo >= i || n.hi >= i)
      bad.push_back("node " + std::to_string(i) + ": not postordered");
    for (uint32_t c : {n.lo, n.hi}) {
      referenced[c] = true;
      if (c > 1 && table_[c].level <= n.level)
        bad.push_back("node " + std::to_string(i) +
                      ": variable order violated");
    }
    uint64_t key = (uint64_t(n.level) << 48) ^ (uint64_t(n.lo) << 24) ^ n.hi;
    if (!seen.emplace(key, i).second)
      bad.push_back("node " + std::to_string(i) + ": duplicate of node " +
                    std::to_string(seen.at(key)));
  }
  for (uint32_t i = 2; i < table_.size(); ++i)
    if (!referenced[i])
      bad.push_back("node " + std::to_string(i) + ": unreachable");
  return bad;
}

std::string Robdd::to_dot(std::span<const std::string> level_names) const {
  std::string out = "digraph robdd {\n";
  auto name = [&](uint32_t level) {
    if (level < level_names.size()) return level_names[level];
    return "F" + std::to_string(level + 1);
  };
  out += "  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n";
  for (uint32_t i = 2; i < table_.size(); ++i)
    out += "  n" + std::to_string(i) + " [label=\"" + name(table_[i].level) +
           "\"];\n";
  for (uint32_t i = 2; i < table_.size(); ++i) {
    out += "  n" + std::to_string(i) + " -> n" + std::to_string(table_[i].lo) +
           " [style=dashed,label=\"0\"];\n";
    out += "  n" + std::to_string(i) + " -> n" + std::to_string(table_[i].hi) +
           " [style=solid,label=\"1\"];\n";
  }
  out += "  root -> n" + std::to_string(root_) + " [style=dotted];\n";
  out += "  root [shape=none,label=\"\"];\n}\n";
  return out;
}

VarOrder VarOrder::identity(uint32_t n) {
  VarOrder o;
  o.anchor_to_level.resize(n);
  for (uint32_t i = 0; i < n; ++i) o.anchor_to_level[i] = i;
  return o;
}

std::vector<uint32_t> VarOrder::level_to_anchor() const {
  std::vector<uint32_t> inv(anchor_to_level.size());
  for (uint32_t i = 0; i < anchor_to_level.size(); ++i)
    inv.at(anchor_to_level[i]) = i;
  return inv;
}

void VarOrder::check() const {
  std::vector<bool> hit(anchor_to_level.size(), false);
  for (uint32_t l : anchor_to_level) {
    if (l >= anchor_to_level.size() || hit[l])
      throw std::invalid_argument("VarOrder: not a permutation");
    hit[l] = true;
  }
}

Robdd build_robdd(const AnchoredTree& at, const VarOrder& order) {
  {
    std::vector<Violation> v = validate(at);
    if (!v.empty())
      throw std::invalid_argument("build_robdd: invalid tree: " +
                                  v.front().message);
  }
  if (at.tree.kind() != TreeKind::kAttack)
    throw std::invalid_argument("build_robdd: plain attack trees only");
  order.check();
  if (order.anchor_to_level.size() != at.arity())
    throw std::invalid_argument("build_robdd: order arity mismatch");

  BddBuilder b(static_cast<uint32_t>(at.arity()));
  std::vector<int32_t> anchor_idx = at.anchor_of_node();
  std::vector<uint32_t> ref(at.tree.size(), 0);
  for (NodeId v : at.tree.topo_order()) {
    const auto& n = at.tree.node(v);
    if (n.gate == GateType::kBas) {
      ref[v] = b.var(order.anchor_to_level[anchor_idx[v]]);
      continue;
    }
    BddBuilder::Op op = n.gate == GateType::kOr ? BddBuilder::Op::kOr
                                                : BddBuilder::Op::kAnd;
    uint32_t acc = ref[n.children[0]];
    for (size_t i = 1; i < n.children.size(); ++i)
      acc = b.apply(op, acc, ref[n.children[i]]);
    ref[v] = acc;
  }
  return b.freeze(ref[at.tree.root()]);
}

namespace {

TruthTable tt_cofactor(const TruthTable& tt, bool bit) {
  TruthTable out{tt.n - 1, 0};
  for (uint64_t m = 0; m < out.rows(); ++m)
    if (tt.value((m << 1) | (bit ? 1 : 0))) out.bits |= uint64_t{1} << m;
  return out;
}

uint32_t build_from_tt(BddBuilder& b, uint32_t level, const TruthTable& tt) {
  if (tt.n == 0) return tt.bits & 1 ? BddBuilder::kOne : BddBuilder::kZero;
  return b.make(level, build_from_tt(b, level + 1, tt_cofactor(tt, false)),
                build_from_tt(b, level + 1, tt_cofactor(tt, true)));
}

}  // namespace

Robdd robdd_from_truth_table(const TruthTable& tt) {
  BddBuilder b(tt.n);
  return b.freeze(build_from_tt(b, 0, tt));
}

TruthTable truth_table(const Robdd& b) {
  if (b.var_count() > 6)
    throw std::length_error("truth_table: more than 6 variables");
  TruthTable tt{b.var_count(), 0};
  for (uint64_t m = 0; m < tt.rows(); ++m)
    if (b.evaluate(AttackVector::from_mask(b.var_count(), m)))
      tt.bits |= uint64_t{1} << m;
  return tt;
}

double bdd_bu(const Robdd& b,
              const std::function<double(double, double, double)>& g,
              double z0, double z1, std::span<const double> x_by_level,
              BddTrace* trace) {
  if (x_by_level.size() != b.var_count())
    throw std::invalid_argument("bdd_bu: value vector arity mismatch");
  const auto& table = b.table();
  std::vector<double> val(table.size());
  val[0] = z0;
  val[1] = z1;
  for (uint32_t i = 2; i < table.size(); ++i) {
    const Robdd::Node& n = table[i];
    val[i] = g(x_by_level[n.level], val[n.lo], val[n.hi]);
    if (trace) trace->entries.push_back({i, n.level, val[i]});
  }
  return val[b.root()];
}

BddPlugin tap_plugin() {
  BddPlugin p;
  p.name = "tap";
  p.g = [](double x, double q, double r) { return (1.0 - x) * q + x * r; };
  p.z0 = 0.0;
  p.z1 = 1.0;
  return p;
}

BddPlugin semiring_plugin(const Semiring& s) {
  if (!s.absorbing)
    throw std::invalid_argument("semiring_plugin: " + s.name +
                                " is not absorbing; the per-node step would "
                                "overcount non-minimal attacks");
  if (!s.one_nabla || !s.one_triangle)
    throw std::invalid_argument("semiring_plugin: " + s.name +
                                " lacks identity elements");
  BddPlugin p;
  p.name = s.name;
  auto nabla = s.nabla;
  auto triangle = s.triangle;
  p.g = [nabla, triangle](double x, double y, double z) {
    return nabla(y, triangle(x, z));
  };
  p.z0 = *s.one_nabla;
  p.z1 = *s.one_triangle;
  return p;
}

double bdd_metric(const AnchoredTree& at, const BddPlugin& plugin,
                  std::span<const double> x, const VarOrder& order,
                  size_t* size_out, BddTrace* trace) {
  if (x.size() != at.arity())
    throw std::invalid_argument("bdd_metric: value vector arity mismatch");
  Robdd b = build_robdd(at, order);
  if (size_out) *size_out = b.internal_nodes();
  std::vector<double> x_by_level(x.size());
  for (uint32_t i = 0; i < x.size(); ++i)
    x_by_level[order.anchor_to_level[i]] = x[i];
  return bdd_bu(b, plugin.g, plugin.z0, plugin.z1, x_by_level, trace);
}

Robdd delta_expand(const Robdd& f) {
  BddBuilder b(f.var_count() + 1);
  return b.freeze(b.import(f, 1));
}

bool precede(const Robdd& f0, const Robdd& f1) {
  if (f0.var_count() != f1.var_count())
    throw std::invalid_argument("precede: variable count mismatch");
  BddBuilder b(f0.var_count());
  return b.apply(BddBuilder::Op::kDiff, b.import(f0, 0), b.import(f1, 0)) ==
         BddBuilder::kZero;
}

Robdd shannon_compose(const Robdd& f0, const Robdd& f1) {
  if (f0.var_count() != f1.var_count())
    throw std::invalid_argument("shannon_compose: variable count mismatch");
  if (f0 == f1 || !precede(f0, f1))
    throw std::invalid_argument(
        "shannon_compose: requires f0 strictly below f1");
  BddBuilder b(f0.var_count() + 1);
  uint32_t r0 = b.import(f0, 1);
  uint32_t r1 = b.import(f1, 1);
  return b.freeze(b.make(0, r0, r1));
}

std::pair<Robdd, Robdd> cofactors(const Robdd& f) {
  if (f.var_count() == 0)
    throw std::invalid_argument("cofactors: no variables");
  BddBuilder b(f.var_count() - 1);
  // only the root can sit at level 0, by the ordering invariant
  auto restrict_top = [&](bool bit) {
    uint32_t start = f.root();
    if (start > 1 && f.table()[start].level == 0)
      start = bit ? f.table()[start].hi : f.table()[start].lo;
    // import everything up to `start`, shifted down one level; postorder
    // means start's descendants are all at smaller indices, and no non-root
    // node can sit at level 0, so the shift stays in range
    std::vector<uint32_t> remap(f.table().size());
    remap[0] = BddBuilder::kZero;
    remap[1] = BddBuilder::kOne;
    for (uint32_t i = 2; i <= start && i < f.table().size(); ++i) {
      const auto& n = f.table()[i];
      remap[i] = b.make(n.level - 1, remap[n.lo], remap[n.hi]);
    }
    return b.freeze(remap[start]);
  };
  return {restrict_top(false), restrict_top(true)};
}

namespace {

bool values_equal(double a, double b, double tol) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= tol;
}

}  // namespace

PsiReport check_psi_conditions(
    const std::function<double(const TruthTable&, std::span<const double>)>&
        psi,
    const std::function<double(double, double, double)>& g, double z0,
    double z1, uint32_t n_max, std::mt19937& rng, int samples,
    const std::function<double(std::mt19937&)>& sample_value, double tol) {
  if (n_max > 4)
    throw std::invalid_argument("check_psi_conditions: n_max capped at 4");
  PsiReport report;
  auto sample_x = [&](uint32_t n) {
    std::vector<double> x(n);
    for (double& v : x) v = sample_value(rng);
    return x;
  };

  // terminal values on the 0-variable constants
  if (!values_equal(psi(TruthTable::constant(0, false), {}), z0, tol))
    report.violations.push_back("psi(const 0) != z0");
  if (!values_equal(psi(TruthTable::constant(0, true), {}), z1, tol))
    report.violations.push_back("psi(const 1) != z1");

  for (uint32_t k = 0; k + 1 <= n_max; ++k) {
    std::vector<TruthTable> fs = monotone_functions(k);
    for (const TruthTable& f : fs) {
      report.functions_checked++;
      TruthTable df = tt_delta(f);
      for (int s = 0; s < samples; ++s) {
        std::vector<double> x = sample_x(k + 1);
        std::span<const double> rest(x.data() + 1, k);
        if (!values_equal(psi(df, x), psi(f, rest), tol)) {
          report.violations.push_back(
              "delta invariance fails at a " + std::to_string(k) +
              "-variable function (table " + std::to_string(f.bits) + ")");
          break;
        }
      }
    }
    for (const TruthTable& f0 : fs) {
      for (const TruthTable& f1 : fs) {
        if (f0 == f1 || !tt_below(f0, f1)) continue;
        report.pairs_checked++;
        TruthTable sh = tt_shannon(f0, f1);
        for (int s = 0; s < samples; ++s) {
          std::vector<double> x = sample_x(k + 1);
          std::span<const double> rest(x.data() + 1, k);
          double lhs = psi(sh, x);
          double rhs = g(x[0], psi(f0, rest), psi(f1, rest));
          if (!values_equal(lhs, rhs, tol)) {
            report.violations.push_back(
                "shannon decomposition fails at tables " +
                std::to_string(f0.bits) + " < " + std::to_string(f1.bits) +
                " (" + std::to_string(lhs) + " vs " + std::to_string(rhs) +
                ")");
            break;
          }
        }
      }
    }
  }
  return report;
}

AnchoredTree at_from_monotone(const TruthTable& tt) {
  if (!tt.is_monotone() || tt.is_constant() || tt.n == 0)
    throw std::invalid_argument(
        "at_from_monotone: need a monotone nonconstant function");
  std::vector<uint64_t> minimal;
  for (uint64_t m = 0; m < tt.rows(); ++m) {
    if (!tt.value(m)) continue;
    bool is_min = true;
    for (uint32_t i = 0; i < tt.n && is_min; ++i)
      if ((m >> i) & 1) is_min = !tt.value(m & ~(uint64_t{1} << i));
    if (is_min) minimal.push_back(m);
  }

  AttackTree t;
  std::vector<NodeId> bas;
  for (uint32_t i = 0; i < tt.n; ++i)
    bas.push_back(t.add_bas("a" + std::to_string(i + 1)));
  std::vector<bool> used(tt.n, false);
  std::vector<NodeId> disjuncts;
  for (uint64_t m : minimal) {
    std::vector<NodeId> conj;
    for (uint32_t i = 0; i < tt.n; ++i)
      if ((m >> i) & 1) {
        conj.push_back(bas[i]);
        used[i] = true;
      }
    disjuncts.push_back(conj.size() == 1 ? conj[0]
                                         : t.add_gate(GateType::kAnd, conj));
  }
  // variables the function ignores still need to be reachable; tack each on
  // as an absorbed disjunct (a_i AND <some minimal point>)
  for (uint32_t i = 0; i < tt.n; ++i) {
    if (used[i]) continue;
    std::vector<NodeId> conj{bas[i]};
    for (uint32_t j = 0; j < tt.n; ++j)
      if ((minimal[0] >> j) & 1) conj.push_back(bas[j]);
    disjuncts.push_back(t.add_gate(GateType::kAnd, conj));
  }
  t.add_gate(GateType::kOr, disjuncts, "r");
  return AnchoredTree{std::move(t), bas};
}

}  // namespace atcalc
