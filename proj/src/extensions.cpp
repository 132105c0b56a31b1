#include "atcalc/extensions.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace atcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void reject_counter_gates(const AttackTree& t, const char* who) {
  for (NodeId v = 0; v < t.size(); ++v)
    if (t.node(v).gate == GateType::kCounter)
      throw std::invalid_argument(std::string(who) +
                                  ": counter gates have no place here");
}

}  // namespace

double DynamicSemiring::fold_lozenge(std::span<const double> xs) const {
  if (xs.empty()) {
    if (!one_lozenge)
      throw std::invalid_argument("fold_lozenge: empty fold without identity");
    return *one_lozenge;
  }
  double acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = lozenge(acc, xs[i]);
  return acc;
}

DynamicSemiring mintime_semiring() {
  DynamicSemiring d;
  d.base = semiring("minskill");  // same (min, max) skeleton on [0, inf]
  d.base.name = "mintime";
  d.lozenge = [](double a, double b) { return a + b; };
  d.one_lozenge = 0.0;
  return d;
}

std::vector<std::string> verify_dynamic_semiring(const DynamicSemiring& d,
                                                 std::mt19937& rng,
                                                 int samples) {
  std::vector<std::string> bad = verify_semiring(d.base, rng, samples);
  for (int i = 0; i < samples; ++i) {
    double a = d.base.sample(rng), b = d.base.sample(rng),
           c = d.base.sample(rng);
    if (d.lozenge(d.lozenge(a, b), c) != d.lozenge(a, d.lozenge(b, c))) {
      bad.push_back("lozenge not associative");
      break;
    }
  }
  if (d.one_lozenge)
    for (int i = 0; i < samples; ++i) {
      double a = d.base.sample(rng);
      if (d.lozenge(*d.one_lozenge, a) != a ||
          d.lozenge(a, *d.one_lozenge) != a) {
        bad.push_back("one_lozenge not an identity");
        break;
      }
    }
  return bad;
}

double dat_bottom_up(const AnchoredTree& at, const DynamicSemiring& d,
                     std::span<const double> x, BuTrace* trace) {
  if (x.size() != at.arity())
    throw std::invalid_argument("dat_bottom_up: value vector arity mismatch");
  std::vector<int32_t> anchor_idx = at.anchor_of_node();
  std::vector<double> val(at.tree.size(), 0.0);
  std::vector<NodeId> topo = at.tree.topo_order();
  std::vector<double> child_vals;
  for (NodeId v : topo) {
    const auto& n = at.tree.node(v);
    if (n.gate == GateType::kBas) {
      val[v] = x[anchor_idx[v]];
      continue;
    }
    child_vals.clear();
    for (NodeId c : n.children) child_vals.push_back(val[c]);
    switch (n.gate) {
      case GateType::kOr:
        val[v] = d.base.fold_nabla(child_vals);
        break;
      case GateType::kAnd:
        val[v] = d.base.fold_triangle(child_vals);
        break;
      case GateType::kSand:
        val[v] = d.fold_lozenge(child_vals);
        break;
      default:
        throw std::invalid_argument("dat_bottom_up: OR/AND/SAND/BAS only");
    }
  }
  if (trace) {
    trace->order = std::move(topo);
    trace->value = val;
  }
  return val[at.tree.root()];
}

AnchoredTree dat_compose(const AnchoredTree& t,
                         std::span<const AnchoredTree> parts) {
  reject_counter_gates(t.tree, "dat_compose");
  for (const AnchoredTree& p : parts)
    reject_counter_gates(p.tree, "dat_compose");
  return star(t, parts);
}

AttributeDomain adt_mincost_domain() {
  AttributeDomain dom;
  dom.name = "mincost";
  auto min2 = [](double a, double b) { return std::min(a, b); };
  auto add = [](double a, double b) { return a + b; };
  dom.nabla_p = min2;    // attacker picks the cheapest option
  dom.triangle_p = add;  // attacker pays for every branch
  dom.box_p = add;       // attacking through a defense costs both sides
  dom.nabla_o = add;     // every defense option must be overcome
  dom.triangle_o = min2; // one overcome branch breaks a joint defense
  dom.box_o = min2;      // a countered defense is as weak as its counter
  dom.opponent_default = kInf;
  return dom;
}

double adt_bottom_up(const AnchoredTree& at, const AttributeDomain& dom,
                     std::span<const double> x, BuTrace* trace) {
  if (x.size() != at.arity())
    throw std::invalid_argument("adt_bottom_up: value vector arity mismatch");
  std::vector<int32_t> anchor_idx = at.anchor_of_node();
  std::vector<double> val(at.tree.size(), 0.0);
  std::vector<NodeId> topo = at.tree.topo_order();
  std::vector<double> child_vals;
  for (NodeId v : topo) {
    const auto& n = at.tree.node(v);
    if (n.gate == GateType::kBas) {
      val[v] = x[anchor_idx[v]];
      continue;
    }
    bool prop = n.actor != Actor::kOpponent;  // unannotated reads proponent
    child_vals.clear();
    for (NodeId c : n.children) child_vals.push_back(val[c]);
    switch (n.gate) {
      case GateType::kOr: {
        const auto& op = prop ? dom.nabla_p : dom.nabla_o;
        double acc = child_vals[0];
        for (size_t i = 1; i < child_vals.size(); ++i)
          acc = op(acc, child_vals[i]);
        val[v] = acc;
        break;
      }
      case GateType::kAnd: {
        const auto& op = prop ? dom.triangle_p : dom.triangle_o;
        double acc = child_vals[0];
        for (size_t i = 1; i < child_vals.size(); ++i)
          acc = op(acc, child_vals[i]);
        val[v] = acc;
        break;
      }
      case GateType::kCounter:
        // validated shape: exactly two children, own-color one first
        val[v] = (prop ? dom.box_p : dom.box_o)(child_vals[0], child_vals[1]);
        break;
      default:
        throw std::invalid_argument("adt_bottom_up: OR/AND/C/BAS only");
    }
  }
  if (trace) {
    trace->order = std::move(topo);
    trace->value = val;
  }
  return val[at.tree.root()];
}

AnchoredTree adt_compose(const AnchoredTree& t, NodeId bas,
                         const AnchoredTree& part) {
  if (bas >= t.tree.size() || t.tree.node(bas).gate != GateType::kBas)
    throw std::invalid_argument("adt_compose: substitution site must be a BAS");
  if (t.tree.node(bas).actor != part.tree.node(part.tree.root()).actor)
    throw std::invalid_argument(
        "adt_compose: grafted root color must match the replaced BAS");
  return substitute(t, bas, part);
}

}  // namespace atcalc
