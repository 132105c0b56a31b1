#include "atcalc/operad.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace atcalc {

Surjection Surjection::identity(uint32_t n) {
  Surjection s{n, n, std::vector<uint32_t>(n)};
  std::iota(s.map.begin(), s.map.end(), 0);
  return s;
}

Surjection Surjection::from_map(std::vector<uint32_t> map) {
  uint32_t m = 0;
  for (uint32_t v : map) m = std::max(m, v + 1);
  Surjection s{static_cast<uint32_t>(map.size()), m, std::move(map)};
  s.check();
  return s;
}

void Surjection::check() const {
  if (map.size() != source_arity)
    throw std::invalid_argument("surjection: map size != source arity");
  std::vector<bool> hit(target_arity, false);
  for (uint32_t v : map) {
    if (v >= target_arity)
      throw std::invalid_argument("surjection: image out of range");
    hit[v] = true;
  }
  for (bool h : hit)
    if (!h) throw std::invalid_argument("surjection: map is not onto");
}

Surjection Surjection::compose(const Surjection& outer,
                               const Surjection& inner) {
  if (inner.target_arity != outer.source_arity)
    throw std::invalid_argument("surjection compose: arity mismatch");
  Surjection s{inner.source_arity, outer.target_arity, {}};
  s.map.reserve(inner.source_arity);
  for (uint32_t v : inner.map) s.map.push_back(outer.map.at(v));
  return s;
}

Surjection Surjection::block_sum(std::span<const Surjection> sigmas) {
  Surjection s;
  uint32_t tgt_off = 0;
  for (const Surjection& si : sigmas) {
    for (uint32_t v : si.map) s.map.push_back(tgt_off + v);
    s.source_arity += si.source_arity;
    tgt_off += si.target_arity;
  }
  s.target_arity = tgt_off;
  return s;
}

Surjection Surjection::block_permutation(const Surjection& sigma,
                                         std::span<const uint32_t> arities) {
  if (!sigma.is_bijection() || sigma.source_arity != arities.size())
    throw std::invalid_argument("block_permutation: need a bijection on the "
                                "part count");
  // offset of block i in the original (target-side) layout
  std::vector<uint32_t> off(arities.size() + 1, 0);
  for (size_t i = 0; i < arities.size(); ++i) off[i + 1] = off[i] + arities[i];
  Surjection s{off.back(), off.back(), {}};
  s.map.reserve(off.back());
  for (uint32_t j = 0; j < sigma.source_arity; ++j) {
    uint32_t block = sigma.map[j];  // source block j holds part sigma(j)
    for (uint32_t k = 0; k < arities[block]; ++k)
      s.map.push_back(off[block] + k);
  }
  return s;
}

std::vector<double> pull_values(const Surjection& sigma,
                                std::span<const double> x) {
  if (x.size() != sigma.target_arity)
    throw std::invalid_argument("pull_values: vector arity mismatch");
  std::vector<double> out;
  out.reserve(sigma.source_arity);
  for (uint32_t v : sigma.map) out.push_back(x[v]);
  return out;
}

AnchoredTree id_tree() {
  AttackTree t;
  t.add_bas("a1");
  return with_default_anchor(std::move(t));
}

namespace {

AnchoredTree prime(GateType g, uint32_t k) {
  if (k == 0) throw std::invalid_argument("prime tree needs arity >= 1");
  AttackTree t;
  std::vector<NodeId> leaves;
  for (uint32_t i = 0; i < k; ++i)
    leaves.push_back(t.add_bas("a" + std::to_string(i + 1)));
  t.add_gate(g, leaves, "r");
  return with_default_anchor(std::move(t));
}

// Appends a relabeled copy of `src` to `dst` and returns old-id -> new-id.
// Walks in topological order: ids carry no order guarantee (star itself
// numbers the outer gates before the part nodes below them).
std::vector<NodeId> append_tree(AttackTree& dst, const AttackTree& src) {
  std::vector<NodeId> remap(src.size(), kInvalidNode);
  for (NodeId v : src.topo_order()) {
    const auto& n = src.node(v);
    if (n.gate == GateType::kBas) {
      remap[v] = dst.add_bas(n.name, n.actor);
    } else {
      std::vector<NodeId> ch;
      ch.reserve(n.children.size());
      for (NodeId c : n.children) ch.push_back(remap[c]);
      remap[v] = dst.add_gate(n.gate, std::move(ch), n.name, n.actor);
    }
  }
  return remap;
}

}  // namespace

AnchoredTree prime_or(uint32_t k) { return prime(GateType::kOr, k); }
AnchoredTree prime_and(uint32_t k) { return prime(GateType::kAnd, k); }

AnchoredTree star(const AnchoredTree& t,
                  std::span<const AnchoredTree> parts) {
  if (parts.size() != t.arity())
    throw std::invalid_argument("star: need one part per anchor index");
  // the outer tree with its BASs elided, left-to-right in id order
  AttackTree out;
  std::vector<NodeId> remap(t.tree.size(), kInvalidNode);
  std::vector<int32_t> anchor_idx = t.anchor_of_node();
  for (NodeId v = 0; v < t.tree.size(); ++v) {
    const auto& n = t.tree.node(v);
    if (n.gate == GateType::kBas) continue;
    remap[v] = out.add_gate(n.gate, {}, n.name, n.actor);
  }
  // parts appended in anchor order; their roots stand in for the BASs
  std::vector<NodeId> part_root(parts.size());
  AnchoredTree result;
  for (size_t i = 0; i < parts.size(); ++i) {
    std::vector<NodeId> part_map = append_tree(out, parts[i].tree);
    part_root[i] = part_map[parts[i].tree.root()];
    for (NodeId a : parts[i].anchor) result.anchor.push_back(part_map[a]);
  }
  for (NodeId v = 0; v < t.tree.size(); ++v) {
    const auto& n = t.tree.node(v);
    if (n.gate == GateType::kBas) continue;
    std::vector<NodeId> ch;
    ch.reserve(n.children.size());
    for (NodeId c : n.children)
      ch.push_back(anchor_idx[c] >= 0 ? part_root[anchor_idx[c]] : remap[c]);
    out.set_children(remap[v], std::move(ch));
  }
  result.tree = std::move(out);
  return result;
}

AnchoredTree substitute(const AnchoredTree& t, NodeId bas,
                        const AnchoredTree& part) {
  std::vector<int32_t> anchor_idx = t.anchor_of_node();
  if (bas >= t.tree.size() || anchor_idx[bas] < 0)
    throw std::invalid_argument("substitute: target is not an anchored BAS");
  uint32_t pos = static_cast<uint32_t>(anchor_idx[bas]);
  std::vector<AnchoredTree> parts;
  parts.reserve(t.arity());
  for (uint32_t i = 0; i < t.arity(); ++i)
    parts.push_back(i == pos ? part : id_tree());
  // keep the untouched BASs' names and actors
  AnchoredTree result = star(t, parts);
  for (uint32_t i = 0; i < t.arity(); ++i) {
    if (i == pos) continue;
    NodeId kept = result.anchor[i >= pos ? i + part.arity() - 1 : i];
    result.tree.set_name(kept, t.tree.node(t.anchor[i]).name);
    result.tree.set_actor(kept, t.tree.node(t.anchor[i]).actor);
  }
  return result;
}

AnchoredTree tau(const Surjection& sigma, const AnchoredTree& t) {
  sigma.check();
  if (sigma.source_arity != t.arity())
    throw std::invalid_argument("tau: surjection source != tree arity");
  if (sigma.is_bijection()) {
    AnchoredTree out{t.tree, std::vector<NodeId>(t.arity())};
    for (uint32_t i = 0; i < t.arity(); ++i)
      out.anchor[sigma.map[i]] = t.anchor[i];
    return out;
  }
  // proper surjection: rebuild with one BAS per image index
  AttackTree out;
  std::vector<NodeId> remap(t.tree.size(), kInvalidNode);
  std::vector<int32_t> anchor_idx = t.anchor_of_node();
  std::vector<NodeId> merged(sigma.target_arity, kInvalidNode);
  AnchoredTree result;
  for (uint32_t j = 0; j < sigma.target_arity; ++j) {
    // name from the first merged preimage
    std::string name;
    for (uint32_t i = 0; i < sigma.source_arity && name.empty(); ++i)
      if (sigma.map[i] == j) name = t.tree.node(t.anchor[i]).name;
    std::optional<Actor> actor;
    for (uint32_t i = 0; i < sigma.source_arity; ++i)
      if (sigma.map[i] == j) actor = t.tree.node(t.anchor[i]).actor;
    merged[j] = out.add_bas(std::move(name), actor);
  }
  for (NodeId v : t.tree.topo_order()) {
    const auto& n = t.tree.node(v);
    if (n.gate == GateType::kBas) {
      remap[v] = merged[sigma.map[anchor_idx[v]]];
      continue;
    }
    std::vector<NodeId> ch;
    ch.reserve(n.children.size());
    for (NodeId c : n.children) ch.push_back(remap[c]);
    remap[v] = out.add_gate(n.gate, std::move(ch), n.name, n.actor);
  }
  result.tree = std::move(out);
  result.anchor = merged;
  return result;
}

size_t PrimeDecomposition::star_count() const {
  size_t c = 0;
  for (const Expr& e : exprs) c += e.kind == Kind::kStar;
  return c;
}

size_t PrimeDecomposition::tau_count() const {
  size_t c = 0;
  for (const Expr& e : exprs) c += e.kind == Kind::kTau;
  return c;
}

namespace {


PrimeDecomposition::Expr make_expr(PrimeDecomposition::Kind k,
                                   uint32_t prime_arity = 0) {
  PrimeDecomposition::Expr e;
  e.kind = k;
  e.prime_arity = prime_arity;
  return e;
}

class Decomposer {
 public:
  PrimeDecomposition take() && { return std::move(d_); }

  uint32_t decompose(const AnchoredTree& t) {
    std::vector<NodeId> gates;
    for (NodeId v = 0; v < t.tree.size(); ++v)
      if (t.tree.node(v).gate != GateType::kBas) gates.push_back(v);

    if (gates.empty()) return emit(make_expr(PrimeDecomposition::Kind::kId));

    if (gates.size() == 1) return single_gate(t, gates[0]);

    // a gate whose children are BASs referenced by it alone splits off
    std::vector<uint32_t> indeg = t.tree.in_degrees();
    for (NodeId v : gates) {
      const auto& n = t.tree.node(v);
      bool module = !n.children.empty();
      for (NodeId c : n.children) {
        if (t.tree.node(c).gate != GateType::kBas) { module = false; break; }
        // all of c's edges must come from v itself
        uint32_t from_v = 0;
        for (NodeId cc : n.children) from_v += cc == c;
        if (indeg[c] != from_v) { module = false; break; }
      }
      if (module) return split_module(t, v);
    }

    // otherwise some BAS is shared between distinct parents: split it into
    // one copy per edge and re-merge with a surjection
    for (NodeId b : t.tree.bas_nodes()) {
      std::vector<NodeId> ps;
      for (NodeId v = 0; v < t.tree.size(); ++v)
        for (NodeId c : t.tree.node(v).children)
          if (c == b) ps.push_back(v);
      std::sort(ps.begin(), ps.end());
      ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
      if (ps.size() >= 2) return split_bas(t, b);
    }
    throw std::logic_error("prime_decompose: no factorization step applies");
  }

 private:
  uint32_t emit(PrimeDecomposition::Expr e) {
    d_.exprs.push_back(std::move(e));
    return static_cast<uint32_t>(d_.exprs.size() - 1);
  }

  // T has exactly one gate: it is a merge of the prime with one leaf per
  // edge. Edges sorted by target anchor make the merge map weakly
  // increasing, so a duplicate-free tree comes out as the bare prime.
  uint32_t single_gate(const AnchoredTree& t, NodeId g) {
    const auto& n = t.tree.node(g);
    std::vector<int32_t> anchor_idx = t.anchor_of_node();
    std::vector<uint32_t> targets;
    for (NodeId c : n.children)
      targets.push_back(static_cast<uint32_t>(anchor_idx[c]));
    std::sort(targets.begin(), targets.end());
    PrimeDecomposition::Kind k = n.gate == GateType::kOr
                                     ? PrimeDecomposition::Kind::kOr
                                     : PrimeDecomposition::Kind::kAnd;
    uint32_t leaf = emit(make_expr(k, static_cast<uint32_t>(targets.size())));
    Surjection sigma{static_cast<uint32_t>(targets.size()),
                     static_cast<uint32_t>(t.arity()), targets};
    if (is_identity(sigma)) return leaf;
    PrimeDecomposition::Expr e =
        make_expr(PrimeDecomposition::Kind::kTau);
    e.sigma = std::move(sigma);
    e.children = {leaf};
    return emit(std::move(e));
  }

  // v and its private BAS children form a one-gate module T_v; the rest is
  // the outer tree with a fresh BAS in v's place. Anchor positions of the
  // module need not be contiguous, so the recomposition is wrapped in the
  // bijection that moves them back where they came from.
  uint32_t split_module(const AnchoredTree& t, NodeId v) {
    const auto& n = t.tree.node(v);
    std::vector<int32_t> anchor_idx = t.anchor_of_node();
    std::vector<uint32_t> module_pos;  // anchor indices inside the module
    for (NodeId c : n.children)
      module_pos.push_back(static_cast<uint32_t>(anchor_idx[c]));
    std::sort(module_pos.begin(), module_pos.end());
    module_pos.erase(std::unique(module_pos.begin(), module_pos.end()),
                     module_pos.end());
    uint32_t k = static_cast<uint32_t>(module_pos.size());

    // T_v with its BASs anchored by original index order
    AnchoredTree part;
    std::vector<NodeId> leaves;
    for (uint32_t j = 0; j < k; ++j) {
      NodeId orig = t.anchor[module_pos[j]];
      leaves.push_back(part.tree.add_bas(t.tree.node(orig).name));
      part.anchor.push_back(leaves.back());
    }
    {
      std::vector<NodeId> ch;
      for (NodeId c : n.children) {
        uint32_t pos = static_cast<uint32_t>(anchor_idx[c]);
        size_t j = std::lower_bound(module_pos.begin(), module_pos.end(),
                                    pos) - module_pos.begin();
        ch.push_back(leaves[j]);
      }
      part.tree.add_gate(n.gate, std::move(ch), n.name);
    }

    // outer tree: everything else, v replaced by a fresh BAS. Its anchors
    // list the surviving BASs in original order with the fresh one at the
    // module's first position.
    uint32_t insert_at = module_pos[0];
    AttackTree outer;
    std::vector<NodeId> remap(t.tree.size(), kInvalidNode);
    AnchoredTree outer_at;
    NodeId fresh = kInvalidNode;
    std::vector<uint32_t> outer_anchor_src;  // original index or ~0 for fresh
    for (uint32_t i = 0; i < t.arity(); ++i) {
      if (std::binary_search(module_pos.begin(), module_pos.end(), i)) {
        if (i == insert_at) outer_anchor_src.push_back(UINT32_MAX);
        continue;
      }
      outer_anchor_src.push_back(i);
    }
    for (uint32_t src : outer_anchor_src) {
      if (src == UINT32_MAX) {
        fresh = outer.add_bas(t.tree.node(v).name);
        outer_at.anchor.push_back(fresh);
      } else {
        NodeId orig = t.anchor[src];
        remap[orig] = outer.add_bas(t.tree.node(orig).name);
        outer_at.anchor.push_back(remap[orig]);
      }
    }
    for (NodeId w : t.tree.topo_order()) {
      const auto& nw = t.tree.node(w);
      if (nw.gate == GateType::kBas || w == v) continue;
      std::vector<NodeId> ch;
      for (NodeId c : nw.children) ch.push_back(c == v ? fresh : remap[c]);
      remap[w] = outer.add_gate(nw.gate, std::move(ch), nw.name);
    }
    outer_at.tree = std::move(outer);

    uint32_t outer_expr = decompose(outer_at);
    uint32_t part_expr = decompose(part);
    PrimeDecomposition::Expr st =
        make_expr(PrimeDecomposition::Kind::kStar);
    st.children.push_back(outer_expr);
    uint32_t fresh_pos = 0;
    for (uint32_t i = 0; i < outer_anchor_src.size(); ++i)
      if (outer_anchor_src[i] == UINT32_MAX) fresh_pos = i;
    for (uint32_t i = 0; i < outer_at.arity(); ++i)
      st.children.push_back(i == fresh_pos
                                ? part_expr
                                : emit(make_expr(PrimeDecomposition::Kind::kId)));
    uint32_t starred = emit(std::move(st));

    // composed anchors: fresh_pos expands to the module block; map each
    // composed position back to its original index
    std::vector<uint32_t> back;
    for (uint32_t i = 0; i < outer_anchor_src.size(); ++i) {
      if (outer_anchor_src[i] == UINT32_MAX)
        for (uint32_t j : module_pos) back.push_back(j);
      else
        back.push_back(outer_anchor_src[i]);
    }
    Surjection pi{static_cast<uint32_t>(back.size()),
                  static_cast<uint32_t>(t.arity()), back};
    if (is_identity(pi)) return starred;
    PrimeDecomposition::Expr e =
        make_expr(PrimeDecomposition::Kind::kTau);
    e.sigma = std::move(pi);
    e.children = {starred};
    return emit(std::move(e));
  }

  // b has parent edges from at least two distinct gates: replace it by one
  // copy per edge (a consecutive anchor block) and re-merge the block.
  uint32_t split_bas(const AnchoredTree& t, NodeId b) {
    std::vector<int32_t> anchor_idx = t.anchor_of_node();
    uint32_t pos = static_cast<uint32_t>(anchor_idx[b]);
    uint32_t k = 0;  // edge count into b
    for (NodeId v = 0; v < t.tree.size(); ++v)
      for (NodeId c : t.tree.node(v).children) k += c == b;

    AttackTree split;
    std::vector<NodeId> remap(t.tree.size(), kInvalidNode);
    AnchoredTree split_at;
    std::vector<NodeId> copies;
    const std::string& bname = t.tree.node(b).name;
    for (uint32_t j = 0; j < k; ++j)
      copies.push_back(split.add_bas(bname + "_" + std::to_string(j + 1)));
    for (NodeId v : t.tree.bas_nodes())
      if (v != b) remap[v] = split.add_bas(t.tree.node(v).name);
    uint32_t used = 0;
    for (NodeId v : t.tree.topo_order()) {
      const auto& n = t.tree.node(v);
      if (n.gate == GateType::kBas) continue;
      std::vector<NodeId> ch;
      for (NodeId c : n.children)
        ch.push_back(c == b ? copies[used++] : remap[c]);
      remap[v] = split.add_gate(n.gate, std::move(ch), n.name);
    }
    split_at.tree = std::move(split);
    // anchors: original order with the copy block where b sat
    std::vector<uint32_t> merge;
    for (uint32_t i = 0; i < t.arity(); ++i) {
      if (i == pos) {
        for (NodeId c : copies) {
          split_at.anchor.push_back(c);
          merge.push_back(pos);
        }
      } else {
        split_at.anchor.push_back(remap[t.anchor[i]]);
        merge.push_back(i);
      }
    }
    uint32_t inner = decompose(split_at);
    PrimeDecomposition::Expr e =
        make_expr(PrimeDecomposition::Kind::kTau);
    e.sigma = Surjection{static_cast<uint32_t>(merge.size()),
                         static_cast<uint32_t>(t.arity()), std::move(merge)};
    e.children = {inner};
    return emit(std::move(e));
  }

  static bool is_identity(const Surjection& s) {
    if (!s.is_bijection()) return false;
    for (uint32_t i = 0; i < s.source_arity; ++i)
      if (s.map[i] != i) return false;
    return true;
  }

  PrimeDecomposition d_;
};

}  // namespace

PrimeDecomposition prime_decompose(const AnchoredTree& t) {
  {
    std::vector<Violation> v = validate(t);
    if (!v.empty())
      throw std::invalid_argument("prime_decompose: invalid tree: " +
                                  v.front().message);
  }
  if (t.tree.kind() != TreeKind::kAttack)
    throw std::invalid_argument(
        "prime_decompose: defined for plain attack trees");
  Decomposer dec;
  PrimeDecomposition d;
  uint32_t root = dec.decompose(t);
  d = std::move(dec).take();
  d.root = root;
  return d;
}

namespace {

AnchoredTree eval_expr(const PrimeDecomposition& d, uint32_t i) {
  const auto& e = d.exprs.at(i);
  switch (e.kind) {
    case PrimeDecomposition::Kind::kId: return id_tree();
    case PrimeDecomposition::Kind::kOr: return prime_or(e.prime_arity);
    case PrimeDecomposition::Kind::kAnd: return prime_and(e.prime_arity);
    case PrimeDecomposition::Kind::kStar: {
      AnchoredTree outer = eval_expr(d, e.children.at(0));
      std::vector<AnchoredTree> parts;
      for (size_t j = 1; j < e.children.size(); ++j)
        parts.push_back(eval_expr(d, e.children[j]));
      return star(outer, parts);
    }
    case PrimeDecomposition::Kind::kTau:
      return tau(e.sigma, eval_expr(d, e.children.at(0)));
  }
  throw std::logic_error("eval_decomposition: bad expression kind");
}

void print_expr(const PrimeDecomposition& d, uint32_t i, std::string& out) {
  const auto& e = d.exprs.at(i);
  switch (e.kind) {
    case PrimeDecomposition::Kind::kId: out += "id"; return;
    case PrimeDecomposition::Kind::kOr:
      out += "or" + std::to_string(e.prime_arity);
      return;
    case PrimeDecomposition::Kind::kAnd:
      out += "and" + std::to_string(e.prime_arity);
      return;
    case PrimeDecomposition::Kind::kStar:
      out += "star(";
      for (size_t j = 0; j < e.children.size(); ++j) {
        if (j) out += ", ";
        print_expr(d, e.children[j], out);
      }
      out += ")";
      return;
    case PrimeDecomposition::Kind::kTau:
      out += "tau([";
      for (size_t j = 0; j < e.sigma.map.size(); ++j) {
        if (j) out += ",";
        out += std::to_string(e.sigma.map[j] + 1);
      }
      out += "], ";
      print_expr(d, e.children.at(0), out);
      out += ")";
      return;
  }
}

}  // namespace

AnchoredTree eval_decomposition(const PrimeDecomposition& d) {
  return eval_expr(d, d.root);
}

std::string to_string(const PrimeDecomposition& d) {
  std::string out;
  print_expr(d, d.root, out);
  return out;
}

}  // namespace atcalc
