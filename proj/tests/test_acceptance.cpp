// Acceptance checks for the whole toolchain: each criterion prints one
// [PASS]/[FAIL] line with its wall time, and the process exits nonzero if
// any line failed. Numeric comparisons are exact for semiring metrics and
// within kTapTol for probabilities.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "atcalc/bdd.hpp"
#include "atcalc/bu.hpp"
#include "atcalc/canonical.hpp"
#include "atcalc/dsl.hpp"
#include "atcalc/extensions.hpp"
#include "atcalc/gen.hpp"
#include "atcalc/metrics.hpp"
#include "atcalc/operad.hpp"
#include "atcalc/semiring.hpp"
#include "atcalc/tree.hpp"
#include "json.hpp"
#include "laws.hpp"

using namespace atcalc;
using json = nlohmann::json;

namespace {

constexpr double kTapTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool close(double a, double b) {
  return a == b || std::abs(a - b) <= kTapTol;
}

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

struct RunResult {
  int code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(ATCALC_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, std::move(out)};
}

// ---- criterion bodies: return "" on pass, a short note on failure ----

std::string check_cli_diagram_tap() {
  RunResult r = run_cli("eval " + fixture("fig8.at") +
                        " --metric tap --algo bdd --trace --values " +
                        fixture("fig8_probs.csv"));
  if (r.code != 0) return "CLI exited " + std::to_string(r.code);
  json out = json::parse(r.out, nullptr, false);
  if (out.is_discarded()) return "output is not JSON";
  if (!close(out["value"].get<double>(), 0.455))
    return "value " + out["value"].dump() + " != 0.455";
  if (out["trace"].size() != 3) return "expected a 3-step trace";
  const char* vars[] = {"a3", "a2", "a1"};
  double vals[] = {0.3, 0.65, 0.455};
  for (int i = 0; i < 3; ++i) {
    if (out["trace"][i]["var"] != vars[i])
      return std::string("trace step ") + std::to_string(i) + " is not " +
             vars[i];
    if (!close(out["trace"][i]["value"].get<double>(), vals[i]))
      return "trace value " + out["trace"][i]["value"].dump();
  }
  return "";
}

std::string check_sequential_formula() {
  std::mt19937 rng(70001);
  DynamicSemiring mt = mintime_semiring();
  std::uniform_int_distribution<int> t(0, 100);
  for (int i = 0; i < 100; ++i) {
    AttackTree tr;
    NodeId a = tr.add_bas("a");
    NodeId b = tr.add_bas("b");
    NodeId c = tr.add_bas("c");
    NodeId g = tr.add_gate(GateType::kAnd, {a, b});
    tr.add_gate(GateType::kSand, {g, c});
    AnchoredTree at{std::move(tr), {a, b, c}};
    double ta = t(rng), tb = t(rng), tc = t(rng);
    std::vector<double> x = {ta, tb, tc};
    double got = dat_bottom_up(at, mt, x);
    if (got != std::max(ta, tb) + tc) {
      std::ostringstream os;
      os << "prepare-then-strike: got " << got << " for (" << ta << "," << tb
         << "," << tc << ")";
      return os.str();
    }
  }
  for (int i = 0; i < 20; ++i) {
    AttackTree tr;
    NodeId a = tr.add_bas("a");
    tr.add_gate(GateType::kSand, {a, a});
    AnchoredTree at{std::move(tr), {a}};
    double ta = t(rng);
    std::vector<double> x = {ta};
    if (dat_bottom_up(at, mt, x) != 2 * ta)
      return "repeat-step tree is not twice the step";
  }
  return "";
}

// fill x with values that make sense for the metric
void sample_values(const std::string& name, std::vector<double>& x,
                   std::mt19937& rng) {
  for (double& v : x) {
    if (name == "tap")
      v = std::uniform_real_distribution<>(0.0, 1.0)(rng);
    else if (name == "sat")
      v = std::uniform_int_distribution<>(0, 1)(rng);
    else
      v = std::uniform_int_distribution<>(0, 20)(rng);
  }
}

std::string check_treelike_agreement() {
  std::mt19937 rng(70002);
  GenOptions opt;
  opt.min_bas = 3;
  opt.max_bas = 8;
  opt.extra_gates = 2;
  opt.parallel_edge_prob = 0.0;
  const char* names[] = {"mincost", "minskill", "sat", "tap"};
  for (int i = 0; i < 500; ++i) {
    AnchoredTree at = random_treelike(rng, opt);
    std::vector<double> x(at.arity());
    for (const char* name : names) {
      const MetricEvaluator& m = metric(name);
      sample_values(name, x, rng);
      double direct = m.eval(at, x);
      double folded = bu(at, m, x);
      bool ok = m.tolerance > 0 ? close(direct, folded) : direct == folded;
      if (!ok) {
        std::ostringstream os;
        os << name << ": bu " << folded << " != eval " << direct
           << " on sample " << i;
        return os.str();
      }
    }
  }
  return "";
}

VarOrder shuffled_order(std::mt19937& rng, uint32_t n) {
  VarOrder order = VarOrder::identity(n);
  std::shuffle(order.anchor_to_level.begin(), order.anchor_to_level.end(),
               rng);
  return order;
}

std::string check_dag_diagram_agreement() {
  std::mt19937 rng(70003);
  GenOptions opt;
  opt.min_bas = 2;
  opt.max_bas = 10;
  opt.extra_gates = 3;
  opt.parallel_edge_prob = 0.15;
  const char* names[] = {"tap", "mincost", "minskill", "sat"};
  for (int i = 0; i < 300; ++i) {
    AnchoredTree at = random_dag(rng, opt);
    uint32_t n = (uint32_t)at.arity();
    std::vector<double> x(n);
    for (const char* name : names) {
      const MetricEvaluator& m = metric(name);
      sample_values(name, x, rng);
      BddPlugin plugin = std::string(name) == "tap"
                             ? tap_plugin()
                             : semiring_plugin(semiring(name));
      double direct = m.eval(at, x);
      double dd = bdd_metric(at, plugin, x, VarOrder::identity(n));
      bool ok = m.tolerance > 0 ? close(direct, dd) : direct == dd;
      if (!ok) {
        std::ostringstream os;
        os << name << ": diagram " << dd << " != eval " << direct
           << " on sample " << i;
        return os.str();
      }
      for (int k = 0; k < 5; ++k) {
        double other = bdd_metric(at, plugin, x, shuffled_order(rng, n));
        ok = m.tolerance > 0 ? close(dd, other) : dd == other;
        if (!ok) {
          std::ostringstream os;
          os << name << ": order changed the value (" << dd << " vs " << other
             << ") on sample " << i;
          return os.str();
        }
      }
    }
  }
  return "";
}

std::string check_merging_dichotomy() {
  std::mt19937 rng(70004);
  // invariant family: folds of idempotent semirings and all bottom-up metrics
  std::vector<MetricEvaluator> pass = {
      metric("minskill"), metric("sat"),
      make_bottom_up_metric(semiring("mincost")),
      make_bottom_up_metric(semiring("maxdamage"))};
  for (const MetricEvaluator& m : pass) {
    MetricCheck r = check_scoperad_morphism(m, 200, rng);
    if (!r.passed()) return m.name + " unexpectedly failed: " + r.summary();
  }
  // sensitive family: must produce a counterexample within the same budget
  for (const char* name : {"mincost", "tap"}) {
    MetricCheck r = check_scoperad_morphism(metric(name), 200, rng);
    if (r.passed())
      return std::string(name) + " passed but merging should break it";
  }

  // the recorded mincost counterexample, pinned exactly
  AttackTree u;
  NodeId a = u.add_bas("a");
  NodeId b = u.add_bas("b");
  NodeId c = u.add_bas("c");
  NodeId d = u.add_bas("d");
  NodeId g1 = u.add_gate(GateType::kOr, {a, b});
  NodeId g2 = u.add_gate(GateType::kOr, {c, d});
  u.add_gate(GateType::kAnd, {g1, g2});
  AnchoredTree unmerged{std::move(u), {a, b, c, d}};
  Surjection sigma = Surjection::from_map({0, 1, 1, 2});
  AnchoredTree shared = tau(sigma, unmerged);
  std::vector<double> x = {3.0, 5.0, 4.0};
  const MetricEvaluator& mincost = metric("mincost");
  if (mincost.eval(shared, x) != 5.0) return "shared mincost is not 5";
  if (mincost.eval(unmerged, pull_values(sigma, x)) != 7.0)
    return "unmerged mincost is not 7";
  if (bu(shared, mincost, x) != 7.0) return "shared bottom-up is not 7";

  // probabilities break too: sharing correlates the two disjuncts
  std::vector<double> p = {0.5, 0.5, 0.5};
  const MetricEvaluator& tap = metric("tap");
  if (!close(tap.eval(shared, p), 0.625)) return "shared tap is not 0.625";
  if (!close(tap.eval(unmerged, pull_values(sigma, p)), 0.5625))
    return "unmerged tap is not 0.5625";
  return "";
}

std::string check_composition_laws() {
  std::mt19937 rng(70005);
  struct Named {
    const char* name;
    laws::LawResult (*sample)(int, std::mt19937&);
  };
  Named suites[] = {{"tau composition", laws::law_tau_compose},
                    {"identity", laws::law_identity},
                    {"associativity", laws::law_associativity},
                    {"merge block sum", laws::law_block_sum},
                    {"equivariance", laws::law_equivariance}};
  for (const Named& s : suites) {
    laws::LawResult r = s.sample(200, rng);
    if (r.failures != 0)
      return std::string(s.name) + ": " + std::to_string(r.failures) +
             " of " + std::to_string(r.samples) + " failed (" +
             r.first_failure + ")";
  }
  return "";
}

double psi_tap(const TruthTable& tt, std::span<const double> p) {
  double total = 0.0;
  for (uint64_t m = 0; m < tt.rows(); ++m) {
    if (!tt.value(m)) continue;
    double w = 1.0;
    for (uint32_t i = 0; i < tt.n; ++i)
      w *= ((m >> i) & 1) ? p[i] : 1.0 - p[i];
    total += w;
  }
  return total;
}

double psi_mincost(const TruthTable& tt, std::span<const double> x) {
  double best = kInf;
  for (uint64_t m = 0; m < tt.rows(); ++m) {
    if (!tt.value(m)) continue;
    bool minimal = true;
    for (uint32_t i = 0; i < tt.n && minimal; ++i)
      if ((m >> i) & 1) minimal = !tt.value(m & ~(uint64_t{1} << i));
    if (!minimal) continue;
    double sum = 0.0;
    for (uint32_t i = 0; i < tt.n; ++i)
      if ((m >> i) & 1) sum += x[i];
    best = std::min(best, sum);
  }
  return best;
}

std::string check_evaluator_characterization() {
  std::mt19937 rng(70006);
  auto sample_p = [](std::mt19937& r) {
    return std::uniform_real_distribution<>(0.0, 1.0)(r);
  };
  auto sample_cost = [](std::mt19937& r) {
    return (double)std::uniform_int_distribution<>(0, 20)(r);
  };

  BddPlugin tap = tap_plugin();
  PsiReport r = check_psi_conditions(psi_tap, tap.g, tap.z0, tap.z1, 3, rng,
                                     50, sample_p, kTapTol);
  if (!r.passed()) return "tap: " + r.violations.front();
  if (r.functions_checked == 0) return "tap: nothing was checked";

  BddPlugin mc = semiring_plugin(semiring("mincost"));
  r = check_psi_conditions(psi_mincost, mc.g, mc.z0, mc.z1, 3, rng, 50,
                           sample_cost, 0.0);
  if (!r.passed()) return "mincost: " + r.violations.front();

  // a deliberately wrong terminal must be caught
  r = check_psi_conditions(psi_tap, tap.g, tap.z0, 0.9, 3, rng, 50, sample_p,
                           kTapTol);
  if (r.passed()) return "broken terminal slipped through";
  bool names_z1 = false;
  for (const std::string& v : r.violations)
    if (v.find("z1") != std::string::npos) names_z1 = true;
  if (!names_z1) return "broken terminal not attributed to z1";
  return "";
}

std::string check_decomposition_roundtrip() {
  std::mt19937 rng(70007);
  GenOptions opt;
  opt.min_bas = 2;
  opt.max_bas = 6;
  opt.extra_gates = 2;
  opt.parallel_edge_prob = 0.2;
  int done = 0;
  while (done < 200) {
    AnchoredTree at =
        done % 2 ? random_dag(rng, opt) : random_treelike(rng, opt);
    if (at.tree.size() > 12) continue;  // the claim is about small trees
    ++done;
    PrimeDecomposition d = prime_decompose(at);
    AnchoredTree back = eval_decomposition(d);
    if (!anchor_isomorphic(at, back))
      return "sample " + std::to_string(done) + " did not round-trip (" +
             to_string(d) + ")";
  }
  return "";
}

std::string check_parser_robustness() {
  std::mt19937 rng(70008);
  // mutation corpus built from the grammar's own shapes
  std::string seed =
      "at bank {\n  r = OR(f, s)\n  s = AND(b, l)\n  f: bas\n  b: bas\n"
      "  l: bas\n}\n"
      "adt fig5b {\n  r@p = OR(c1, d)\n  c1@p = C(a, c2)\n  c2@o = C(b, c)\n"
      "  a: bas\n  b: bas\n  c: bas\n  d: bas\n}\n";
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    if (i % 4 == 0) {
      int n = std::uniform_int_distribution<int>(0, 300)(rng);
      for (int j = 0; j < n; ++j) s.push_back((char)byte(rng));
    } else {
      size_t cut = std::uniform_int_distribution<size_t>(0, seed.size())(rng);
      s = seed.substr(0, cut) + seed.substr(std::min(seed.size(), cut + 7));
      for (int j = 0; j < 6 && !s.empty(); ++j)
        s[std::uniform_int_distribution<size_t>(0, s.size() - 1)(rng)] =
            (char)byte(rng);
    }
    try {
      parse_tree(s);
      parse_values_csv(s);
    } catch (const std::exception& e) {
      return "input " + std::to_string(i) + " threw: " + e.what();
    } catch (...) {
      return "input " + std::to_string(i) + " threw a non-standard exception";
    }
  }

  GenOptions opt;
  opt.min_bas = 2;
  opt.max_bas = 7;
  opt.extra_gates = 2;
  opt.parallel_edge_prob = 0.2;
  for (int i = 0; i < 500; ++i) {
    AnchoredTree at;
    switch (i % 4) {
      case 0: at = random_treelike(rng, opt); break;
      case 1: at = random_dag(rng, opt); break;
      case 2: at = random_dat(rng, opt); break;
      default: at = random_adt(rng); break;
    }
    LinkResult back = parse_tree(print_document(to_document(at, "t")));
    if (!back.ok()) return "round-trip " + std::to_string(i) + " failed to parse";
    if (!anchor_isomorphic(at, *back.tree))
      return "round-trip " + std::to_string(i) + " changed the tree";
  }
  return "";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::string (*run)();
  };
  const Criterion criteria[] = {
      {"running-example probability through the decision diagram", 1.0,
       check_cli_diagram_tap},
      {"scheduling formula on sequential trees", 1.0,
       check_sequential_formula},
      {"bottom-up equals enumeration on treelike trees", 30.0,
       check_treelike_agreement},
      {"decision diagram equals enumeration on DAGs, any order", 60.0,
       check_dag_diagram_agreement},
      {"merging dichotomy across the metric registry", 30.0,
       check_merging_dichotomy},
      {"composition laws on random instances", 30.0, check_composition_laws},
      {"diagram-evaluator characterization", 10.0,
       check_evaluator_characterization},
      {"prime decomposition round-trips", 30.0,
       check_decomposition_roundtrip},
      {"parser robustness under fuzzing", 30.0, check_parser_robustness},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string note;
    try {
      note = c.run();
    } catch (const std::exception& e) {
      note = std::string("threw: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (note.empty() && secs > c.budget_s) {
      std::ostringstream os;
      os << "over budget (" << secs << "s > " << c.budget_s << "s)";
      note = os.str();
    }
    if (note.empty()) {
      printf("[PASS] %s (%.2fs)\n", c.name, secs);
    } else {
      printf("[FAIL] %s: %s (%.2fs)\n", c.name, note.c_str(), secs);
      failed++;
    }
  }
  return failed == 0 ? 0 : 1;
}
