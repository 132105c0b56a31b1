#include "atcalc/canonical.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace atcalc {

namespace {

bool order_sensitive(GateType g) {
  return g == GateType::kSand || g == GateType::kCounter;
}

// Raw per-node signature used during refinement. Ids refer to the previous
// round's color classes; assignment by sorted signature keeps the mapping
// invariant under node renaming.
struct Sig {
  int gate;             // -1 for BAS
  int actor;            // -1 when absent
  int anchor;           // BAS anchor index, -1 for gates
  int prev;             // previous color, -1 in the first round
  std::vector<int> down;  // child colors (sorted unless order-sensitive)
  // (parent color, slot-or-minus-1) pairs, sorted
  std::vector<std::pair<int, int>> up;

  auto tie() const { return std::tie(gate, actor, anchor, prev, down, up); }
  bool operator<(const Sig& o) const { return tie() < o.tie(); }
  bool operator==(const Sig& o) const { return tie() == o.tie(); }
};

}  // namespace

std::string canonical_form(const AnchoredTree& at) {
  {
    std::vector<Violation> v = validate(at);
    if (!v.empty())
      throw std::invalid_argument("canonical_form: invalid tree: " +
                                  v.front().message);
  }
  const AttackTree& t = at.tree;
  const size_t n_nodes = t.size();
  std::vector<int32_t> anchor_idx = at.anchor_of_node();

  // (parent, slot) pairs per node; slot recorded only for order-sensitive
  // parents, where the position in the child list carries meaning.
  std::vector<std::vector<std::pair<NodeId, int>>> parents(n_nodes);
  for (NodeId v = 0; v < n_nodes; ++v) {
    const auto& node = t.node(v);
    for (size_t s = 0; s < node.children.size(); ++s)
      parents[node.children[s]].emplace_back(
          v, order_sensitive(node.gate) ? static_cast<int>(s) : -1);
  }

  // Refine node colors until the class count stops growing. Signatures only
  // extend the previous color, so classes split monotonically and the loop
  // ends after at most n_nodes rounds.
  std::vector<int> color(n_nodes, -1);
  size_t classes = 0;
  for (size_t round = 0; round < n_nodes + 1; ++round) {
    std::vector<Sig> sigs(n_nodes);
    for (NodeId v = 0; v < n_nodes; ++v) {
      const auto& node = t.node(v);
      Sig& s = sigs[v];
      s.gate = node.gate == GateType::kBas ? -1 : static_cast<int>(node.gate);
      s.actor = node.actor ? static_cast<int>(*node.actor) : -1;
      s.anchor = anchor_idx[v];
      s.prev = color[v];
      for (NodeId c : node.children) s.down.push_back(color[c]);
      if (!order_sensitive(node.gate))
        std::sort(s.down.begin(), s.down.end());
      for (auto [p, slot] : parents[v]) s.up.emplace_back(color[p], slot);
      std::sort(s.up.begin(), s.up.end());
    }
    std::map<Sig, int> ids;
    for (const Sig& s : sigs) ids.emplace(s, 0);
    int next = 0;
    for (auto& [sig, id] : ids) id = next++;
    for (NodeId v = 0; v < n_nodes; ++v) color[v] = ids.at(sigs[v]);
    if (ids.size() == classes) break;
    classes = ids.size();
  }

  // Number nodes by first visit in a DFS that takes children in color order
  // (keeping list order for SAND/C and for same-color siblings, which are
  // interchangeable at this point).
  std::vector<int> serial(n_nodes, -1);
  std::vector<NodeId> by_serial;
  std::vector<NodeId> stack{t.root()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (serial[v] >= 0) continue;
    serial[v] = static_cast<int>(by_serial.size());
    by_serial.push_back(v);
    const auto& node = t.node(v);
    std::vector<NodeId> ch = node.children;
    if (!order_sensitive(node.gate))
      std::stable_sort(ch.begin(), ch.end(), [&](NodeId a, NodeId b) {
        return color[a] < color[b];
      });
    // push reversed so the lowest-color child is visited first
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }

  std::string out = "n" + std::to_string(at.arity()) + ";";
  for (NodeId v : by_serial) {
    const auto& node = t.node(v);
    out += std::to_string(serial[v]);
    out += node.gate == GateType::kBas ? "B" : gate_name(node.gate);
    if (node.actor) out += actor_letter(*node.actor);
    if (anchor_idx[v] >= 0) out += "#" + std::to_string(anchor_idx[v]);
    if (!node.children.empty()) {
      std::vector<int> ch;
      for (NodeId c : node.children) ch.push_back(serial[c]);
      if (!order_sensitive(node.gate)) std::sort(ch.begin(), ch.end());
      out += "(";
      for (size_t i = 0; i < ch.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(ch[i]);
      }
      out += ")";
    }
    out += ";";
  }
  return out;
}

bool anchor_isomorphic(const AnchoredTree& a, const AnchoredTree& b) {
  if (a.arity() != b.arity() || a.tree.size() != b.tree.size()) return false;
  return canonical_form(a) == canonical_form(b);
}

}  // namespace atcalc
