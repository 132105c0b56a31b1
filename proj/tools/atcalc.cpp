// atcalc: evaluate, compose, canonicalize, decompose and diagram attack
// trees from the command line. Exit codes: 0 success, 2 invalid input,
// 3 metric/algorithm incompatibility.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atcalc/bdd.hpp"
#include "atcalc/bu.hpp"
#include "atcalc/canonical.hpp"
#include "atcalc/dsl.hpp"
#include "atcalc/extensions.hpp"
#include "atcalc/metrics.hpp"
#include "atcalc/operad.hpp"
#include "atcalc/semiring.hpp"
#include "atcalc/tree.hpp"
#include "json.hpp"

namespace {

using atcalc::AnchoredTree;
using atcalc::TreeKind;
using json = nlohmann::ordered_json;

constexpr int kExitInvalid = 2;
constexpr int kExitIncompatible = 3;

struct CliError {
  int code;
  std::string message;
};

json json_value(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitInvalid, path + ": cannot open"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::string format_diagnostics(const std::string& path,
                               const std::vector<atcalc::Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += "\n";
    out += path + ":" + atcalc::to_string(d);
  }
  return out;
}

struct LoadedTree {
  atcalc::TreeDocument doc;
  AnchoredTree at;
};

LoadedTree load_tree(const std::string& path) {
  std::string text = read_file(path);
  atcalc::ParseResult pr = atcalc::parse_document(text);
  if (!pr.doc || !pr.diagnostics.empty())
    throw CliError{kExitInvalid, format_diagnostics(path, pr.diagnostics)};
  atcalc::LinkResult lr = atcalc::link_document(*pr.doc);
  if (!lr.tree || !lr.diagnostics.empty())
    throw CliError{kExitInvalid, format_diagnostics(path, lr.diagnostics)};
  return {std::move(*pr.doc), std::move(*lr.tree)};
}

std::map<std::string, double> load_values(const std::string& path) {
  atcalc::ValuesResult vr = atcalc::parse_values_csv(read_file(path));
  if (!vr.ok())
    throw CliError{kExitInvalid, format_diagnostics(path, vr.diagnostics)};
  return std::move(vr.values);
}

uint32_t enum_cap() {
  const char* env = std::getenv("ATCALC_ENUM_CAP");
  if (!env || !*env) return atcalc::kDefaultEnumCap;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (!end || *end != '\0' || v == 0 || v > 63)
    throw CliError{kExitInvalid,
                   std::string("ATCALC_ENUM_CAP: expected 1..63, got '") +
                       env + "'"};
  return static_cast<uint32_t>(v);
}

// "2,1,3": the k-th listed anchor (1-based) becomes level k-1 (the top).
atcalc::VarOrder parse_order(const std::string& spec, size_t n) {
  atcalc::VarOrder order;
  order.anchor_to_level.assign(n, UINT32_MAX);
  std::stringstream ss{spec};
  std::string tok;
  uint32_t level = 0;
  while (std::getline(ss, tok, ',')) {
    size_t used = 0;
    unsigned long idx = 0;
    try {
      idx = std::stoul(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || idx < 1 || idx > n)
      throw CliError{kExitInvalid, "--order: bad entry '" + tok + "'"};
    if (order.anchor_to_level[idx - 1] != UINT32_MAX)
      throw CliError{kExitInvalid,
                     "--order: anchor " + tok + " listed twice"};
    order.anchor_to_level[idx - 1] = level++;
  }
  if (level != n)
    throw CliError{kExitInvalid, "--order: need all of 1.." +
                                     std::to_string(n) + " exactly once"};
  return order;
}

// Anchor-indexed value vector from the name-keyed assignment. Opponent BASs
// may be absent when the domain supplies a default.
std::vector<double> values_for(const AnchoredTree& at,
                               const std::map<std::string, double>& values,
                               const std::optional<double>& opponent_default) {
  std::set<std::string> seen;
  for (atcalc::NodeId v : at.anchor) {
    const std::string& name = at.tree.node(v).name;
    if (name.empty())
      throw CliError{kExitInvalid, "unnamed BAS cannot receive a value"};
    if (!seen.insert(name).second)
      throw CliError{kExitInvalid, "BAS name '" + name +
                                       "' is ambiguous in the value file"};
  }
  std::vector<double> x(at.arity());
  for (size_t i = 0; i < at.anchor.size(); ++i) {
    const auto& node = at.tree.node(at.anchor[i]);
    auto it = values.find(node.name);
    if (it != values.end()) {
      x[i] = it->second;
      continue;
    }
    if (node.actor == atcalc::Actor::kOpponent && opponent_default) {
      x[i] = *opponent_default;
      continue;
    }
    throw CliError{kExitInvalid, "no value for BAS '" + node.name + "'"};
  }
  return x;
}

struct EvalOptions {
  std::string metric;
  std::string algo;
  std::string values_path;
  std::string order_spec;
  bool trace = false;
  bool compare = false;
};

bool is_semiring_metric(const std::string& name) {
  return name == "mincost" || name == "minskill" || name == "sat" ||
         name == "maxdamage";
}

atcalc::MetricEvaluator metric_for(const std::string& name, uint32_t cap) {
  if (name == "tap") return atcalc::make_tap_metric(cap);
  if (name == "struct") return atcalc::make_struct_metric();
  return atcalc::make_propositional_metric(atcalc::semiring(name), cap);
}

json bu_trace_json(const AnchoredTree& at, const atcalc::BuTrace& bt) {
  json out = json::array();
  for (atcalc::NodeId v : bt.order) {
    const auto& n = at.tree.node(v);
    std::string label =
        n.name.empty() ? "#" + std::to_string(v) : n.name;
    out.push_back({{"node", label}, {"value", json_value(bt.value[v])}});
  }
  return out;
}

json eval_one(const std::string& path, const EvalOptions& opt,
              const std::map<std::string, double>& values, uint32_t cap) {
  LoadedTree loaded = load_tree(path);
  const AnchoredTree& at = loaded.at;
  TreeKind kind = loaded.doc.kind;
  size_t n = at.arity();

  // compatibility matrix: which metric/algorithm pairs mean anything here
  if (kind == TreeKind::kAttackDefense) {
    if (opt.metric != "mincost")
      throw CliError{kExitIncompatible,
                     "attack-defense trees support --metric mincost only"};
    if (opt.algo != "bu")
      throw CliError{kExitIncompatible,
                     "attack-defense trees support --algo bu only"};
  } else if (kind == TreeKind::kDynamic) {
    if (!is_semiring_metric(opt.metric) && opt.metric != "mintime")
      throw CliError{kExitIncompatible,
                     "dynamic trees support semiring metrics and mintime"};
    if (opt.algo != "bu")
      throw CliError{kExitIncompatible,
                     "dynamic trees support --algo bu only"};
  } else {
    if (opt.metric == "mintime" && opt.algo != "bu")
      throw CliError{kExitIncompatible, "mintime is bottom-up only"};
    if (opt.algo == "bdd" && opt.metric == "maxdamage")
      throw CliError{kExitIncompatible,
                     "maxdamage is not absorbing; the decision-diagram "
                     "algorithm would overcount non-minimal attacks"};
  }
  if (opt.compare && (kind != TreeKind::kAttack || opt.metric == "mintime"))
    throw CliError{kExitIncompatible,
                   "--compare needs an enumeration oracle (plain trees, "
                   "registry metrics)"};
  if (!opt.order_spec.empty() && opt.algo != "bdd")
    throw CliError{kExitInvalid, "--order only applies to --algo bdd"};

  std::optional<double> opp_default;
  if (kind == TreeKind::kAttackDefense)
    opp_default = atcalc::adt_mincost_domain().opponent_default;
  std::vector<double> x = values_for(at, values, opp_default);
  if (opt.metric == "tap")
    for (double p : x)
      if (!(p >= 0.0 && p <= 1.0))
        throw CliError{kExitInvalid, "tap needs probabilities in [0,1]"};
  if (opt.metric == "struct")
    for (double b : x)
      if (b != 0.0 && b != 1.0)
        throw CliError{kExitInvalid, "struct needs 0/1 values"};

  double value = 0.0;
  size_t bdd_size = 0;
  atcalc::BuTrace bt;
  atcalc::BddTrace dt;
  atcalc::VarOrder order = opt.order_spec.empty()
                               ? atcalc::VarOrder::identity((uint32_t)n)
                               : parse_order(opt.order_spec, n);

  if (kind == TreeKind::kAttackDefense) {
    value = atcalc::adt_bottom_up(at, atcalc::adt_mincost_domain(), x,
                                  opt.trace ? &bt : nullptr);
  } else if (kind == TreeKind::kDynamic || opt.metric == "mintime") {
    atcalc::DynamicSemiring d;
    if (opt.metric == "mintime") {
      d = atcalc::mintime_semiring();
    } else {
      // SAND sequences fold with the AND operator: joint cost-like metrics
      // read a sequence exactly like a parallel conjunction
      d.base = atcalc::semiring(opt.metric);
      auto tri = d.base.triangle;
      d.lozenge = tri;
      d.one_lozenge = d.base.one_triangle;
    }
    value = atcalc::dat_bottom_up(at, d, x, opt.trace ? &bt : nullptr);
  } else {
    atcalc::MetricEvaluator m = metric_for(opt.metric, cap);
    if (opt.algo == "enum") {
      value = m.eval(at, x);
    } else if (opt.algo == "bu") {
      value = atcalc::bu(at, m, x, opt.trace ? &bt : nullptr);
    } else {
      atcalc::BddPlugin plugin =
          opt.metric == "tap"
              ? atcalc::tap_plugin()
              : atcalc::semiring_plugin(atcalc::semiring(
                    opt.metric == "struct" ? "sat" : opt.metric));
      value = atcalc::bdd_metric(at, plugin, x, order, &bdd_size,
                                 opt.trace ? &dt : nullptr);
    }
  }

  json out{{"schema", 1},
           {"file", path},
           {"tree", loaded.doc.name},
           {"metric", opt.metric},
           {"algo", opt.algo},
           {"value", json_value(value)},
           {"nodes", at.tree.size()}};
  if (opt.algo == "bdd") out["bdd_size"] = bdd_size;
  if (opt.trace) {
    if (opt.algo == "bdd") {
      std::vector<uint32_t> level_anchor = order.level_to_anchor();
      json tr = json::array();
      for (const auto& e : dt.entries) {
        const auto& bas = at.tree.node(at.anchor[level_anchor[e.level]]);
        std::string var = bas.name.empty()
                              ? "F" + std::to_string(e.level + 1)
                              : bas.name;
        tr.push_back({{"index", e.index},
                      {"var", var},
                      {"value", json_value(e.value)}});
      }
      out["trace"] = std::move(tr);
    } else if (opt.algo == "bu") {
      out["trace"] = bu_trace_json(at, bt);
    }
  }
  if (opt.compare) {
    atcalc::MetricEvaluator m = metric_for(opt.metric, cap);
    double oracle = m.eval(at, x);
    bool agree = value == oracle ||
                 (std::isfinite(value) && std::isfinite(oracle) &&
                  std::abs(value - oracle) <= m.tolerance);
    out["oracle"] = {{"value", json_value(oracle)}, {"agree", agree}};
  }
  return out;
}

int run_eval(const std::vector<std::string>& files, const EvalOptions& opt,
             int jobs) {
  uint32_t cap = enum_cap();
  std::map<std::string, double> values = load_values(opt.values_path);
  std::vector<json> results(files.size());
  if (jobs <= 1 || files.size() <= 1) {
    for (size_t i = 0; i < files.size(); ++i)
      results[i] = eval_one(files[i], opt, values, cap);
  } else {
    // evaluate concurrently, collate in input order
    std::vector<std::future<json>> futures;
    futures.reserve(files.size());
    for (const std::string& f : files)
      futures.push_back(std::async(std::launch::async, [&, f] {
        return eval_one(f, opt, values, cap);
      }));
    std::optional<CliError> first_error;
    for (size_t i = 0; i < futures.size(); ++i) {
      try {
        results[i] = futures[i].get();
      } catch (const CliError& e) {
        if (!first_error) first_error = e;
      }
    }
    if (first_error) throw *first_error;
  }
  for (const json& r : results) std::cout << r.dump() << "\n";
  return 0;
}

int run_compose(const std::string& outer_path,
                const std::vector<std::string>& subs) {
  LoadedTree outer = load_tree(outer_path);
  AnchoredTree at = std::move(outer.at);
  bool outer_adt = outer.doc.kind == TreeKind::kAttackDefense;
  for (const std::string& sub : subs) {
    size_t eq = sub.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == sub.size())
      throw CliError{kExitInvalid, "--sub: expected name=FILE, got '" + sub +
                                       "'"};
    std::string name = sub.substr(0, eq);
    LoadedTree part = load_tree(sub.substr(eq + 1));
    bool part_adt = part.doc.kind == TreeKind::kAttackDefense;
    if (outer_adt != part_adt)
      throw CliError{kExitIncompatible,
                     "cannot mix attack-defense and uncolored trees"};
    atcalc::NodeId site = atcalc::kInvalidNode;
    for (atcalc::NodeId v : at.tree.bas_nodes()) {
      if (at.tree.node(v).name != name) continue;
      if (site != atcalc::kInvalidNode)
        throw CliError{kExitInvalid, "--sub: BAS name '" + name +
                                         "' is ambiguous"};
      site = v;
    }
    if (site == atcalc::kInvalidNode)
      throw CliError{kExitInvalid, "--sub: no BAS named '" + name + "'"};
    try {
      at = outer_adt ? atcalc::adt_compose(at, site, part.at)
                     : atcalc::substitute(at, site, part.at);
    } catch (const std::invalid_argument& e) {
      // the one type error of two-colored composition
      throw CliError{kExitIncompatible, e.what()};
    }
  }
  TreeKind kind = at.tree.kind();
  std::vector<atcalc::Violation> viols;
  switch (kind) {
    case TreeKind::kAttack: viols = atcalc::validate(at.tree); break;
    case TreeKind::kDynamic: viols = atcalc::validate_dat(at.tree); break;
    case TreeKind::kAttackDefense: viols = atcalc::validate_adt(at.tree); break;
  }
  if (!viols.empty())
    throw CliError{kExitInvalid,
                   "composition is not well-formed: " + viols.front().message};
  std::cout << atcalc::print_document(
      atcalc::to_document(at, outer.doc.name, kind));
  return 0;
}

int run_canon(const std::string& path) {
  std::cout << atcalc::canonical_form(load_tree(path).at) << "\n";
  return 0;
}

int run_decompose(const std::string& path) {
  LoadedTree loaded = load_tree(path);
  if (loaded.at.tree.kind() != TreeKind::kAttack)
    throw CliError{kExitIncompatible,
                   "decomposition is defined for plain attack trees"};
  std::cout << atcalc::to_string(atcalc::prime_decompose(loaded.at)) << "\n";
  return 0;
}

int run_bdd(const std::string& path, bool want_json,
            const std::string& order_spec) {
  LoadedTree loaded = load_tree(path);
  const AnchoredTree& at = loaded.at;
  if (at.tree.kind() != TreeKind::kAttack)
    throw CliError{kExitIncompatible,
                   "decision diagrams are defined for plain attack trees"};
  atcalc::VarOrder order =
      order_spec.empty() ? atcalc::VarOrder::identity((uint32_t)at.arity())
                         : parse_order(order_spec, at.arity());
  atcalc::Robdd b = atcalc::build_robdd(at, order);
  std::vector<uint32_t> level_anchor = order.level_to_anchor();
  std::vector<std::string> names(at.arity());
  for (uint32_t level = 0; level < names.size(); ++level) {
    const auto& bas = at.tree.node(at.anchor[level_anchor[level]]);
    names[level] =
        bas.name.empty() ? "F" + std::to_string(level + 1) : bas.name;
  }
  if (!want_json) {
    std::cout << b.to_dot(names);
    return 0;
  }
  json nodes = json::array();
  for (uint32_t i = 2; i < b.table().size(); ++i) {
    const auto& node = b.table()[i];
    nodes.push_back({{"idx", i},
                     {"var", names[node.level]},
                     {"level", node.level},
                     {"lo", node.lo},
                     {"hi", node.hi}});
  }
  json out{{"schema", 1},
           {"file", path},
           {"tree", loaded.doc.name},
           {"var_count", b.var_count()},
           {"root", b.root()},
           {"nodes", std::move(nodes)}};
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attack tree metrics over semirings and decision diagrams"};
  app.require_subcommand(1);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a metric on tree files");
  std::vector<std::string> eval_files;
  EvalOptions opt;
  int jobs = 1;
  eval->add_option("files", eval_files, "tree source files")
      ->required()
      ->expected(-1);
  eval->add_option("--metric", opt.metric, "metric name")
      ->required()
      ->check(CLI::IsMember({"mincost", "minskill", "sat", "maxdamage", "tap",
                             "struct", "mintime"}));
  eval->add_option("--algo", opt.algo, "evaluation algorithm")
      ->check(CLI::IsMember({"bu", "bdd", "enum"}))
      ->default_val("bu");
  eval->add_option("--values", opt.values_path, "name,value CSV")->required();
  eval->add_option("--order", opt.order_spec,
                   "variable order for --algo bdd: 1-based anchor indices, "
                   "top level first");
  eval->add_flag("--trace", opt.trace, "include per-node values");
  eval->add_flag("--compare", opt.compare,
                 "also run the enumeration oracle and report agreement");
  eval->add_option("--jobs", jobs, "evaluate files concurrently")
      ->check(CLI::Range(1, 256));

  // compose
  auto* compose =
      app.add_subcommand("compose", "substitute trees for BASs, print source");
  std::string compose_outer;
  std::vector<std::string> compose_subs;
  compose->add_option("outer", compose_outer, "outer tree file")->required();
  compose->add_option("--sub", compose_subs, "name=FILE substitution")
      ->required();

  // canon
  auto* canon =
      app.add_subcommand("canon", "print the canonical serialization");
  std::string canon_file;
  canon->add_option("file", canon_file, "tree source file")->required();

  // decompose
  auto* decompose = app.add_subcommand(
      "decompose", "print the prime decomposition expression");
  std::string decompose_file;
  decompose->add_option("file", decompose_file, "tree source file")
      ->required();

  // bdd
  auto* bdd = app.add_subcommand("bdd", "print the decision diagram");
  std::string bdd_file, bdd_order;
  bool bdd_dot = false, bdd_json = false;
  bdd->add_option("file", bdd_file, "tree source file")->required();
  bdd->add_flag("--dot", bdd_dot, "DOT output (default)");
  bdd->add_flag("--json", bdd_json, "JSON node table");
  bdd->add_option("--order", bdd_order, "variable order, as in eval");

  try {
    app.parse(argc, argv);
    if (eval->parsed()) return run_eval(eval_files, opt, jobs);
    if (compose->parsed()) return run_compose(compose_outer, compose_subs);
    if (canon->parsed()) return run_canon(canon_file);
    if (decompose->parsed()) return run_decompose(decompose_file);
    if (bdd->parsed()) {
      if (bdd_dot && bdd_json)
        throw CliError{kExitInvalid, "--dot and --json are exclusive"};
      return run_bdd(bdd_file, bdd_json, bdd_order);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliError& e) {
    std::cerr << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
