#include "atcalc/tree.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace atcalc {

const char* gate_name(GateType g) {
  switch (g) {
    case GateType::kBas: return "BAS";
    case GateType::kOr: return "OR";
    case GateType::kAnd: return "AND";
    case GateType::kSand: return "SAND";
    case GateType::kCounter: return "C";
  }
  return "?";
}

char actor_letter(Actor a) {
  return a == Actor::kProponent ? 'p' : 'o';
}

NodeId AttackTree::add_bas(std::string name, std::optional<Actor> actor) {
  nodes_.push_back(Node{GateType::kBas, {}, std::move(name), actor});
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId AttackTree::add_gate(GateType gate, std::vector<NodeId> children,
                            std::string name, std::optional<Actor> actor) {
  if (gate == GateType::kBas)
    throw std::invalid_argument("add_gate: use add_bas for BAS nodes");
  for (NodeId c : children)
    if (c >= nodes_.size())
      throw std::out_of_range("add_gate: child id out of range");
  nodes_.push_back(Node{gate, std::move(children), std::move(name), actor});
  return static_cast<NodeId>(nodes_.size() - 1);
}

const AttackTree::Node& AttackTree::node(NodeId v) const {
  return nodes_.at(v);
}

void AttackTree::set_name(NodeId v, std::string name) {
  nodes_.at(v).name = std::move(name);
}

void AttackTree::set_actor(NodeId v, std::optional<Actor> actor) {
  nodes_.at(v).actor = actor;
}

void AttackTree::set_children(NodeId v, std::vector<NodeId> children) {
  if (nodes_.at(v).gate == GateType::kBas)
    throw std::invalid_argument("set_children: BAS nodes are leaves");
  for (NodeId c : children)
    if (c >= nodes_.size())
      throw std::out_of_range("set_children: child id out of range");
  nodes_[v].children = std::move(children);
}

std::vector<uint32_t> AttackTree::in_degrees() const {
  std::vector<uint32_t> deg(nodes_.size(), 0);
  for (const Node& n : nodes_)
    for (NodeId c : n.children) deg[c]++;
  return deg;
}

NodeId AttackTree::root() const {
  NodeId root = kInvalidNode;
  std::vector<uint32_t> deg = in_degrees();
  for (NodeId v = 0; v < nodes_.size(); ++v) {
    if (deg[v] == 0) {
      if (root != kInvalidNode)
        throw std::logic_error("root: multiple parentless nodes");
      root = v;
    }
  }
  if (root == kInvalidNode) throw std::logic_error("root: no parentless node");
  return root;
}

std::vector<NodeId> AttackTree::bas_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].gate == GateType::kBas) out.push_back(v);
  return out;
}

// Kahn's algorithm on reversed edges; emits children before parents.
// Requires an acyclic graph (validate() first on untrusted input).
std::vector<NodeId> AttackTree::topo_order() const {
  // pending[v] = distinct children of v not yet emitted
  std::vector<uint32_t> pending(nodes_.size(), 0);
  std::vector<std::vector<NodeId>> parents(nodes_.size());
  for (NodeId v = 0; v < nodes_.size(); ++v) {
    std::vector<NodeId> ch = nodes_[v].children;
    std::sort(ch.begin(), ch.end());
    ch.erase(std::unique(ch.begin(), ch.end()), ch.end());
    pending[v] = static_cast<uint32_t>(ch.size());
    for (NodeId c : ch) parents[c].push_back(v);
  }
  std::vector<NodeId> order;
  order.reserve(nodes_.size());
  for (NodeId v = 0; v < nodes_.size(); ++v)
    if (pending[v] == 0) order.push_back(v);
  for (size_t i = 0; i < order.size(); ++i) {
    for (NodeId p : parents[order[i]])
      if (--pending[p] == 0) order.push_back(p);
  }
  if (order.size() != nodes_.size())
    throw std::logic_error("topo_order: graph has a cycle");
  return order;
}

TreeKind AttackTree::kind() const {
  bool dyn = false;
  for (const Node& n : nodes_) {
    if (n.gate == GateType::kCounter || n.actor.has_value())
      return TreeKind::kAttackDefense;
    if (n.gate == GateType::kSand) dyn = true;
  }
  return dyn ? TreeKind::kDynamic : TreeKind::kAttack;
}

namespace {

// Shared structural checks: one root, reachable, acyclic, BAS iff leaf.
// Gate-set and actor rules differ per flavour and are layered on top.
void check_shape(const AttackTree& t, std::vector<Violation>& out) {
  if (t.empty()) {
    out.push_back({"tree has no nodes", kInvalidNode});
    return;
  }
  std::vector<uint32_t> deg = t.in_degrees();
  std::vector<NodeId> roots;
  for (NodeId v = 0; v < t.size(); ++v)
    if (deg[v] == 0) roots.push_back(v);
  if (roots.empty())
    out.push_back({"no root: every node has a parent (cycle)", kInvalidNode});
  for (size_t i = 1; i < roots.size(); ++i)
    out.push_back({"multiple roots", roots[i]});

  bool has_bas = false;
  for (NodeId v = 0; v < t.size(); ++v) {
    const auto& n = t.node(v);
    bool leaf = n.children.empty();
    if (n.gate == GateType::kBas) {
      has_bas = true;
      if (!leaf) out.push_back({"BAS node has children", v});
    } else if (leaf) {
      out.push_back({"gate node has no children", v});
    }
  }
  if (!has_bas) out.push_back({"tree has no BAS", kInvalidNode});

  // cycle check: iterative DFS with colors over all nodes
  enum : uint8_t { kWhite, kGray, kBlack };
  std::vector<uint8_t> color(t.size(), kWhite);
  for (NodeId start = 0; start < t.size(); ++start) {
    if (color[start] != kWhite) continue;
    // stack of (node, next child position)
    std::vector<std::pair<NodeId, size_t>> stack{{start, 0}};
    color[start] = kGray;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      const auto& ch = t.node(v).children;
      if (i == ch.size()) {
        color[v] = kBlack;
        stack.pop_back();
        continue;
      }
      NodeId c = ch[i++];
      if (color[c] == kGray) {
        out.push_back({"cycle through node", c});
        color[c] = kBlack;  // report each back edge target once
      } else if (color[c] == kWhite) {
        color[c] = kGray;
        stack.emplace_back(c, 0);
      }
    }
  }

  // reachability from the root (only meaningful with a unique root)
  if (roots.size() == 1 && out.empty()) {
    std::vector<bool> seen(t.size(), false);
    std::vector<NodeId> work{roots[0]};
    seen[roots[0]] = true;
    while (!work.empty()) {
      NodeId v = work.back();
      work.pop_back();
      for (NodeId c : t.node(v).children)
        if (!seen[c]) {
          seen[c] = true;
          work.push_back(c);
        }
    }
    for (NodeId v = 0; v < t.size(); ++v)
      if (!seen[v]) out.push_back({"node unreachable from root", v});
  }
}

}  // namespace

std::vector<Violation> validate(const AttackTree& t) {
  std::vector<Violation> out;
  check_shape(t, out);
  for (NodeId v = 0; v < t.size(); ++v) {
    const auto& n = t.node(v);
    if (n.gate != GateType::kBas && n.gate != GateType::kOr &&
        n.gate != GateType::kAnd)
      out.push_back({std::string("gate ") + gate_name(n.gate) +
                         " not allowed in a plain attack tree",
                     v});
    if (n.actor.has_value())
      out.push_back({"actor annotation outside an attack-defense tree", v});
  }
  return out;
}

std::vector<Violation> validate_dat(const AttackTree& t) {
  std::vector<Violation> out;
  check_shape(t, out);
  for (NodeId v = 0; v < t.size(); ++v) {
    const auto& n = t.node(v);
    if (n.gate == GateType::kCounter)
      out.push_back({"C gate not allowed in a dynamic attack tree", v});
    if (n.actor.has_value())
      out.push_back({"actor annotation outside an attack-defense tree", v});
  }
  // The sequential order of a SAND node is its stored child order, so it is
  // defined exactly on SAND nodes by construction; nothing extra to check.
  return out;
}

std::vector<Violation> validate_adt(const AttackTree& t) {
  std::vector<Violation> out;
  check_shape(t, out);
  for (NodeId v = 0; v < t.size(); ++v) {
    const auto& n = t.node(v);
    if (n.gate == GateType::kSand)
      out.push_back({"SAND gate not allowed in an attack-defense tree", v});
    if (!n.actor.has_value()) {
      out.push_back({"node has no actor", v});
      continue;
    }
    if (n.gate == GateType::kOr || n.gate == GateType::kAnd) {
      for (NodeId c : n.children)
        if (t.node(c).actor.has_value() && t.node(c).actor != n.actor)
          out.push_back({"OR/AND child actor differs from parent", c});
    } else if (n.gate == GateType::kCounter) {
      if (n.children.size() != 2) {
        out.push_back({"C gate must have exactly two children", v});
        continue;
      }
      auto a0 = t.node(n.children[0]).actor;
      auto a1 = t.node(n.children[1]).actor;
      if (a0 != n.actor)
        out.push_back({"first C child must share the gate's actor", v});
      if (a1 == n.actor)
        out.push_back({"second C child must have the opposite actor", v});
    }
  }
  return out;
}

AttackVector::AttackVector(uint32_t n) : n_(n) {
  if (n_ > 64) ext_.resize((n_ - 1) / 64, 0);
}

AttackVector AttackVector::from_mask(uint32_t n, uint64_t mask) {
  if (n > 64) throw std::length_error("from_mask: more than 64 bits");
  if (n < 64 && (mask >> n) != 0)
    throw std::out_of_range("from_mask: mask has bits beyond n");
  AttackVector b(n);
  b.word_ = mask;
  return b;
}

bool AttackVector::get(uint32_t i) const {
  if (i >= n_) throw std::out_of_range("AttackVector::get");
  if (i < 64) return (word_ >> i) & 1;
  return (ext_[i / 64 - 1] >> (i % 64)) & 1;
}

void AttackVector::set(uint32_t i, bool value) {
  if (i >= n_) throw std::out_of_range("AttackVector::set");
  uint64_t& w = i < 64 ? word_ : ext_[i / 64 - 1];
  uint64_t bit = uint64_t{1} << (i % 64);
  w = value ? (w | bit) : (w & ~bit);
}

uint64_t AttackVector::mask() const {
  if (n_ > 64) throw std::length_error("mask: more than 64 bits");
  return word_;
}

uint32_t AttackVector::count() const {
  uint32_t c = std::popcount(word_);
  for (uint64_t w : ext_) c += std::popcount(w);
  return c;
}

bool AttackVector::dominates(const AttackVector& other) const {
  if (n_ != other.n_) throw std::invalid_argument("dominates: size mismatch");
  if ((other.word_ & ~word_) != 0) return false;
  for (size_t i = 0; i < ext_.size(); ++i)
    if ((other.ext_[i] & ~ext_[i]) != 0) return false;
  return true;
}

std::string to_string(const AttackVector& b) {
  std::string s(b.size(), '0');
  for (uint32_t i = 0; i < b.size(); ++i)
    if (b.get(i)) s[i] = '1';
  return s;
}

std::vector<int32_t> AnchoredTree::anchor_of_node() const {
  std::vector<int32_t> idx(tree.size(), -1);
  for (size_t i = 0; i < anchor.size(); ++i) idx.at(anchor[i]) = (int32_t)i;
  return idx;
}

AnchoredTree with_default_anchor(AttackTree tree) {
  AnchoredTree at{std::move(tree), {}};
  at.anchor = at.tree.bas_nodes();
  return at;
}

std::vector<Violation> validate(const AnchoredTree& at) {
  std::vector<Violation> out;
  switch (at.tree.kind()) {
    case TreeKind::kAttack: out = validate(at.tree); break;
    case TreeKind::kDynamic: out = validate_dat(at.tree); break;
    case TreeKind::kAttackDefense: out = validate_adt(at.tree); break;
  }
  // the anchoring must be a bijection BAS -> [n]
  std::vector<NodeId> bas = at.tree.bas_nodes();
  std::vector<bool> hit(at.tree.size(), false);
  for (NodeId v : at.anchor) {
    if (v >= at.tree.size() || at.tree.node(v).gate != GateType::kBas) {
      out.push_back({"anchor entry is not a BAS", v});
      continue;
    }
    if (hit[v]) out.push_back({"BAS anchored twice", v});
    hit[v] = true;
  }
  for (NodeId v : bas)
    if (!hit[v]) out.push_back({"BAS has no anchor index", v});
  return out;
}

namespace {

// One bottom-up sweep of the structure function for a fixed activation,
// writing every node's truth value into `val`.
void eval_all(const AttackTree& t, const std::vector<NodeId>& topo,
              const std::vector<int32_t>& anchor_idx, const AttackVector& b,
              std::vector<uint8_t>& val) {
  for (NodeId v : topo) {
    const auto& n = t.node(v);
    bool r;
    switch (n.gate) {
      case GateType::kBas:
        r = b.get(static_cast<uint32_t>(anchor_idx[v]));
        break;
      case GateType::kAnd: {
        r = true;
        for (NodeId c : n.children) r = r && val[c];
        break;
      }
      case GateType::kOr: {
        r = false;
        for (NodeId c : n.children) r = r || val[c];
        break;
      }
      default:
        throw std::invalid_argument(
            "structure function is defined for OR/AND/BAS trees only");
    }
    val[v] = r;
  }
}

}  // namespace

bool structure_function(const AnchoredTree& at, const AttackVector& b,
                        NodeId v) {
  if (b.size() != at.arity())
    throw std::invalid_argument("structure_function: vector arity mismatch");
  if (v >= at.tree.size())
    throw std::out_of_range("structure_function: node out of range");
  std::vector<uint8_t> val(at.tree.size(), 0);
  eval_all(at.tree, at.tree.topo_order(), at.anchor_of_node(), b, val);
  return val[v];
}

std::vector<bool> success_table(const AnchoredTree& at, uint32_t cap) {
  uint32_t n = static_cast<uint32_t>(at.arity());
  if (n > cap || n > 63)
    throw std::length_error("success_table: too many BASs to enumerate");
  std::vector<NodeId> topo = at.tree.topo_order();
  std::vector<int32_t> anchor_idx = at.anchor_of_node();
  NodeId root = at.tree.root();
  std::vector<bool> suc;
  suc.reserve(uint64_t{1} << n);
  std::vector<uint8_t> val(at.tree.size(), 0);
  for (uint64_t m = 0; m < (uint64_t{1} << n); ++m) {
    eval_all(at.tree, topo, anchor_idx, AttackVector::from_mask(n, m), val);
    suc.push_back(val[root] != 0);
  }
  return suc;
}

std::vector<AttackVector> successful_attacks(const AnchoredTree& at,
                                             uint32_t cap) {
  uint32_t n = static_cast<uint32_t>(at.arity());
  std::vector<bool> suc = success_table(at, cap);
  std::vector<AttackVector> out;
  for (uint64_t m = 0; m < suc.size(); ++m)
    if (suc[m]) out.push_back(AttackVector::from_mask(n, m));
  return out;
}

std::vector<AttackVector> minimal_attacks(const AnchoredTree& at,
                                          uint32_t cap) {
  uint32_t n = static_cast<uint32_t>(at.arity());
  std::vector<bool> suc = success_table(at, cap);
  std::vector<AttackVector> out;
  for (uint64_t m = 0; m < suc.size(); ++m) {
    if (!suc[m]) continue;
    bool minimal = true;
    for (uint32_t i = 0; i < n && minimal; ++i)
      if ((m >> i) & 1) minimal = !suc[m & ~(uint64_t{1} << i)];
    if (minimal) out.push_back(AttackVector::from_mask(n, m));
  }
  return out;
}

}  // namespace atcalc
