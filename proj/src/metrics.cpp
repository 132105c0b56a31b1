#include "atcalc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atcalc {

bool eval_structure_metric(const AnchoredTree& at, const AttackVector& b) {
  return structure_function(at, b, at.tree.root());
}

double eval_tap(const AnchoredTree& at, std::span<const double> p,
                uint32_t cap) {
  if (p.size() != at.arity())
    throw std::invalid_argument("eval_tap: probability vector arity mismatch");
  for (double pi : p)
    if (!(pi >= 0.0 && pi <= 1.0))
      throw std::invalid_argument("eval_tap: probability outside [0,1]");
  std::vector<bool> suc = success_table(at, cap);
  uint32_t n = static_cast<uint32_t>(at.arity());
  double total = 0.0;
  for (uint64_t m = 0; m < suc.size(); ++m) {
    if (!suc[m]) continue;
    double w = 1.0;
    for (uint32_t i = 0; i < n; ++i)
      w *= ((m >> i) & 1) ? p[i] : 1.0 - p[i];
    total += w;
  }
  return total;
}

double eval_propositional_semiring(const Semiring& s, const AnchoredTree& at,
                                   std::span<const double> x, uint32_t cap) {
  if (x.size() != at.arity())
    throw std::invalid_argument(
        "eval_propositional_semiring: value vector arity mismatch");
  std::vector<AttackVector> attacks = minimal_attacks(at, cap);
  std::vector<double> alternatives;
  alternatives.reserve(attacks.size());
  std::vector<double> steps;
  for (const AttackVector& b : attacks) {
    steps.clear();
    for (uint32_t i = 0; i < b.size(); ++i)
      if (b.get(i)) steps.push_back(x[i]);
    alternatives.push_back(s.fold_triangle(steps));
  }
  return s.fold_nabla(alternatives);
}

double eval_bottom_up_semiring(const Semiring& s, const AnchoredTree& at,
                               std::span<const double> x) {
  if (x.size() != at.arity())
    throw std::invalid_argument(
        "eval_bottom_up_semiring: value vector arity mismatch");
  std::vector<int32_t> anchor_idx = at.anchor_of_node();
  std::vector<double> val(at.tree.size(), 0.0);
  std::vector<double> child_vals;
  for (NodeId v : at.tree.topo_order()) {
    const auto& n = at.tree.node(v);
    switch (n.gate) {
      case GateType::kBas:
        val[v] = x[anchor_idx[v]];
        break;
      case GateType::kOr:
      case GateType::kAnd: {
        child_vals.clear();
        for (NodeId c : n.children) child_vals.push_back(val[c]);
        val[v] = n.gate == GateType::kOr ? s.fold_nabla(child_vals)
                                         : s.fold_triangle(child_vals);
        break;
      }
      default:
        throw std::invalid_argument(
            "eval_bottom_up_semiring: OR/AND/BAS trees only");
    }
  }
  return val[at.tree.root()];
}

MetricEvaluator make_propositional_metric(const Semiring& s, uint32_t cap) {
  MetricEvaluator m;
  m.name = s.name;
  m.eval = [s, cap](const AnchoredTree& at, std::span<const double> x) {
    return eval_propositional_semiring(s, at, x, cap);
  };
  m.or_op = [s](std::span<const double> xs) { return s.fold_nabla(xs); };
  m.and_op = [s](std::span<const double> xs) { return s.fold_triangle(xs); };
  m.is_propositional = true;
  // merging two BASs drops one operand from every triangle/nabla fold that
  // mentioned both, which is invisible exactly when the ops are idempotent
  m.merge_invariant = s.idempotent_nabla && s.idempotent_triangle;
  m.tolerance = 0.0;
  m.sample_value = s.sample;
  return m;
}

MetricEvaluator make_bottom_up_metric(const Semiring& s) {
  MetricEvaluator m;
  m.name = s.name + "-bu";
  m.eval = [s](const AnchoredTree& at, std::span<const double> x) {
    return eval_bottom_up_semiring(s, at, x);
  };
  m.or_op = [s](std::span<const double> xs) { return s.fold_nabla(xs); };
  m.and_op = [s](std::span<const double> xs) { return s.fold_triangle(xs); };
  m.is_propositional = false;
  m.merge_invariant = true;
  m.tolerance = 0.0;
  m.sample_value = s.sample;
  return m;
}

MetricEvaluator make_tap_metric(uint32_t cap) {
  MetricEvaluator m;
  m.name = "tap";
  m.eval = [cap](const AnchoredTree& at, std::span<const double> p) {
    return eval_tap(at, p, cap);
  };
  m.or_op = [](std::span<const double> ps) {
    double q = 1.0;
    for (double p : ps) q *= 1.0 - p;
    return 1.0 - q;
  };
  m.and_op = [](std::span<const double> ps) {
    double q = 1.0;
    for (double p : ps) q *= p;
    return q;
  };
  m.is_propositional = true;
  m.merge_invariant = false;
  m.tolerance = 1e-12;
  m.sample_value = [](std::mt19937& rng) {
    // multiples of 1/64 keep products well away from the tolerance
    return std::uniform_int_distribution<>(0, 64)(rng) / 64.0;
  };
  return m;
}

MetricEvaluator make_struct_metric() {
  MetricEvaluator m;
  m.name = "struct";
  m.eval = [](const AnchoredTree& at, std::span<const double> x) {
    AttackVector b(static_cast<uint32_t>(x.size()));
    for (uint32_t i = 0; i < x.size(); ++i) {
      if (x[i] != 0.0 && x[i] != 1.0)
        throw std::invalid_argument("struct metric: values must be 0 or 1");
      b.set(i, x[i] == 1.0);
    }
    return eval_structure_metric(at, b) ? 1.0 : 0.0;
  };
  m.or_op = [](std::span<const double> xs) {
    return std::any_of(xs.begin(), xs.end(), [](double v) { return v == 1.0; })
               ? 1.0 : 0.0;
  };
  m.and_op = [](std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return v == 1.0; })
               ? 1.0 : 0.0;
  };
  m.is_propositional = true;
  m.merge_invariant = true;
  m.tolerance = 0.0;
  m.sample_value = [](std::mt19937& rng) {
    return std::uniform_int_distribution<>(0, 1)(rng);
  };
  return m;
}

const std::vector<MetricEvaluator>& metric_registry() {
  static const std::vector<MetricEvaluator> all = [] {
    std::vector<MetricEvaluator> v;
    for (const Semiring& s : builtin_semirings())
      v.push_back(make_propositional_metric(s));
    v.push_back(make_tap_metric());
    v.push_back(make_struct_metric());
    return v;
  }();
  return all;
}

const MetricEvaluator& metric(const std::string& name) {
  for (const MetricEvaluator& m : metric_registry())
    if (m.name == name) return m;
  throw std::invalid_argument("unknown metric: " + name);
}

}  // namespace atcalc
