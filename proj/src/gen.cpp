#include "atcalc/gen.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace atcalc {

namespace {

uint32_t pick(std::mt19937& rng, uint32_t lo, uint32_t hi) {
  return std::uniform_int_distribution<uint32_t>(lo, hi)(rng);
}

bool chance(std::mt19937& rng, double p) {
  return std::uniform_real_distribution<>(0, 1)(rng) < p;
}

GateType pick_gate(std::mt19937& rng, bool allow_sand) {
  uint32_t r = pick(rng, 0, allow_sand ? 2 : 1);
  return r == 0 ? GateType::kOr : r == 1 ? GateType::kAnd : GateType::kSand;
}

}  // namespace

AnchoredTree random_treelike(std::mt19937& rng, const GenOptions& opt) {
  uint32_t n = pick(rng, std::max(1u, opt.min_bas), opt.max_bas);
  AttackTree t;
  std::vector<NodeId> bas;
  for (uint32_t i = 0; i < n; ++i)
    bas.push_back(t.add_bas("a" + std::to_string(i + 1)));

  // recursively group the leaves under fresh gates
  std::function<NodeId(std::vector<NodeId>)> build =
      [&](std::vector<NodeId> group) -> NodeId {
    if (group.size() == 1) return group[0];
    uint32_t parts = pick(rng, 2, std::min<uint32_t>(opt.max_gate_arity,
                                                     (uint32_t)group.size()));
    std::shuffle(group.begin(), group.end(), rng);
    std::vector<std::vector<NodeId>> buckets(parts);
    for (size_t i = 0; i < group.size(); ++i)
      buckets[i < parts ? i : pick(rng, 0, parts - 1)].push_back(group[i]);
    std::vector<NodeId> children;
    for (auto& b : buckets) children.push_back(build(std::move(b)));
    return t.add_gate(pick_gate(rng, opt.allow_sand), std::move(children));
  };
  if (n == 1 && chance(rng, 0.5)) {
    // keep bare-BAS trees in the mix
  } else if (n == 1) {
    t.add_gate(pick_gate(rng, opt.allow_sand), {bas[0]});
  } else {
    build(bas);
  }

  AnchoredTree at{std::move(t), bas};
  std::shuffle(at.anchor.begin(), at.anchor.end(), rng);
  return at;
}

AnchoredTree random_dag(std::mt19937& rng, const GenOptions& opt) {
  uint32_t n = pick(rng, std::max(1u, opt.min_bas), opt.max_bas);
  AttackTree t;
  std::vector<NodeId> bas;
  for (uint32_t i = 0; i < n; ++i)
    bas.push_back(t.add_bas("a" + std::to_string(i + 1)));

  // `open` nodes still lack a parent; each new gate adopts at least one of
  // them (so the construction converges to a single root) plus random
  // already-parented nodes, which creates sharing. An occasional repeated
  // child is a parallel edge.
  std::vector<NodeId> open = bas;
  uint32_t budget = opt.extra_gates;
  while (open.size() > 1 || budget > 0) {
    std::shuffle(open.begin(), open.end(), rng);
    // with budget spent, adopt at least two so `open` strictly shrinks
    uint32_t adopt = std::min<uint32_t>(
        (uint32_t)open.size(), budget > 0 ? pick(rng, 1, 2) : pick(rng, 2, 3));
    uint32_t arity = std::max(adopt, pick(rng, 1, opt.max_gate_arity));
    std::vector<NodeId> children;
    for (uint32_t i = 0; i < adopt; ++i) children.push_back(open[i]);
    open.erase(open.begin(), open.begin() + adopt);
    while (children.size() < arity) {
      if (chance(rng, opt.parallel_edge_prob) && !children.empty())
        children.push_back(children[pick(rng, 0, (uint32_t)children.size() - 1)]);
      else
        children.push_back(pick(rng, 0, (uint32_t)t.size() - 1));
    }
    std::shuffle(children.begin(), children.end(), rng);
    NodeId g = t.add_gate(pick_gate(rng, opt.allow_sand), std::move(children));
    open.push_back(g);
    if (budget > 0) --budget;
  }

  AnchoredTree at{std::move(t), bas};
  std::shuffle(at.anchor.begin(), at.anchor.end(), rng);
  return at;
}

AnchoredTree random_dat(std::mt19937& rng, GenOptions opt) {
  opt.allow_sand = true;
  return random_dag(rng, opt);
}

AnchoredTree random_adt(std::mt19937& rng, uint32_t max_depth) {
  AttackTree t;
  std::vector<NodeId> bas;
  std::function<NodeId(Actor, uint32_t)> build = [&](Actor actor,
                                                     uint32_t depth) -> NodeId {
    uint32_t r = depth == 0 ? 0 : pick(rng, 0, 5);
    if (r <= 1) {
      NodeId b = t.add_bas("", actor);
      bas.push_back(b);
      return b;
    }
    if (r == 5 && depth >= 1) {
      // counter node: same-actor child first, opposing child second
      NodeId same = build(actor, depth - 1);
      NodeId other = build(actor == Actor::kProponent ? Actor::kOpponent
                                                      : Actor::kProponent,
                           depth - 1);
      return t.add_gate(GateType::kCounter, {same, other}, "", actor);
    }
    uint32_t arity = pick(rng, 2, 3);
    std::vector<NodeId> ch;
    for (uint32_t i = 0; i < arity; ++i) ch.push_back(build(actor, depth - 1));
    return t.add_gate(r % 2 ? GateType::kOr : GateType::kAnd, std::move(ch),
                      "", actor);
  };
  build(Actor::kProponent, max_depth);
  for (size_t i = 0; i < bas.size(); ++i)
    t.set_name(bas[i],
               std::string(t.node(bas[i]).actor == Actor::kOpponent ? "d" : "a") +
                   std::to_string(i + 1));
  AnchoredTree at{std::move(t), bas};
  std::shuffle(at.anchor.begin(), at.anchor.end(), rng);
  return at;
}

Surjection random_surjection(std::mt19937& rng, uint32_t n, uint32_t m) {
  if (m == 0 || m > n)
    throw std::invalid_argument("random_surjection: need 1 <= m <= n");
  std::vector<uint32_t> map(n);
  for (uint32_t& v : map) v = pick(rng, 0, m - 1);
  // stamp each target onto a distinct source so the map is onto
  std::vector<uint32_t> slots(n);
  std::iota(slots.begin(), slots.end(), 0);
  std::shuffle(slots.begin(), slots.end(), rng);
  for (uint32_t j = 0; j < m; ++j) map[slots[j]] = j;
  return Surjection{n, m, std::move(map)};
}

Surjection random_permutation(std::mt19937& rng, uint32_t n) {
  std::vector<uint32_t> map(n);
  std::iota(map.begin(), map.end(), 0);
  std::shuffle(map.begin(), map.end(), rng);
  return Surjection{n, n, std::move(map)};
}

}  // namespace atcalc
