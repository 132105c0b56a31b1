#include "atcalc/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace atcalc {

std::string to_string(const Diagnostic& d) {
  std::string out =
      std::to_string(d.line) + ":" + std::to_string(d.col) + ": " + d.message;
  if (!d.expected.empty()) out += " (expected " + d.expected + ")";
  return out;
}

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Cursor over one comment-stripped source line.
struct LineScanner {
  std::string_view s;
  int line = 0;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r'))
      pos++;
  }
  int col() {
    skip_ws();
    return static_cast<int>(pos) + 1;
  }
  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }
  bool match(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      pos++;
      return true;
    }
    return false;
  }
  std::string_view ident() {
    skip_ws();
    size_t begin = pos;
    if (pos < s.size() && ident_start(s[pos])) {
      pos++;
      while (pos < s.size() && ident_char(s[pos])) pos++;
    }
    return s.substr(begin, pos - begin);
  }
};

std::string_view strip_comment(std::string_view line) {
  size_t hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

const char* kind_word(TreeKind k) {
  switch (k) {
    case TreeKind::kAttack: return "at";
    case TreeKind::kDynamic: return "dat";
    case TreeKind::kAttackDefense: return "adt";
  }
  return "at";
}

}  // namespace

ParseResult parse_document(std::string_view text) {
  ParseResult out;
  TreeDocument doc;
  auto diag = [&](int line, int col, std::string msg, std::string exp = {}) {
    out.diagnostics.push_back({line, col, std::move(msg), std::move(exp)});
  };

  enum class State { kHeader, kBody, kDone };
  State state = State::kHeader;
  int lineno = 0;
  size_t cursor = 0;
  while (cursor <= text.size()) {
    size_t nl = text.find('\n', cursor);
    std::string_view raw = text.substr(
        cursor, nl == std::string_view::npos ? text.size() - cursor
                                             : nl - cursor);
    cursor = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    lineno++;
    std::string_view line = strip_comment(raw);
    if (blank(line)) continue;
    LineScanner sc{line, lineno};

    if (state == State::kDone) {
      diag(lineno, sc.col(), "content after the closing '}'");
      continue;
    }

    if (state == State::kHeader) {
      std::string_view kw = sc.ident();
      if (kw == "at") doc.kind = TreeKind::kAttack;
      else if (kw == "dat") doc.kind = TreeKind::kDynamic;
      else if (kw == "adt") doc.kind = TreeKind::kAttackDefense;
      else {
        diag(lineno, static_cast<int>(sc.pos - kw.size()) + 1,
             "malformed header", "at, dat or adt");
        continue;  // stay in header state; try the next line
      }
      std::string_view name = sc.ident();
      if (name.empty()) {
        diag(lineno, sc.col(), "missing tree name", "an identifier");
        continue;
      }
      doc.name = std::string(name);
      if (!sc.match('{')) {
        diag(lineno, sc.col(), "missing '{'", "'{'");
        continue;
      }
      if (!sc.at_end())
        diag(lineno, sc.col(), "trailing content after '{'");
      state = State::kBody;
      continue;
    }

    // body line: '}' or a declaration
    if (sc.match('}')) {
      if (!sc.at_end()) diag(lineno, sc.col(), "trailing content after '}'");
      state = State::kDone;
      continue;
    }
    Declaration d;
    d.line = lineno;
    d.col = sc.col();
    std::string_view name = sc.ident();
    if (name.empty()) {
      diag(lineno, sc.col(), "malformed declaration", "a node name or '}'");
      continue;
    }
    d.name = std::string(name);
    if (sc.match('@')) {
      std::string_view a = sc.ident();
      if (a == "p") d.actor = Actor::kProponent;
      else if (a == "o") d.actor = Actor::kOpponent;
      else {
        diag(lineno, sc.col(), "bad actor annotation", "p or o");
        continue;
      }
    }
    if (sc.match(':')) {
      std::string_view kw = sc.ident();
      if (kw != "bas") {
        diag(lineno, sc.col() - static_cast<int>(kw.size()),
             "malformed leaf declaration", "bas");
        continue;
      }
      if (!sc.at_end()) {
        diag(lineno, sc.col(), "trailing content after 'bas'");
        continue;
      }
      d.gate = GateType::kBas;
      doc.decls.push_back(std::move(d));
      continue;
    }
    if (!sc.match('=')) {
      diag(lineno, sc.col(), "malformed declaration", "':' or '='");
      continue;
    }
    std::string_view gate = sc.ident();
    if (gate == "OR") d.gate = GateType::kOr;
    else if (gate == "AND") d.gate = GateType::kAnd;
    else if (gate == "SAND") d.gate = GateType::kSand;
    else if (gate == "C") d.gate = GateType::kCounter;
    else {
      diag(lineno, sc.col() - static_cast<int>(gate.size()), "unknown gate",
           "OR, AND, SAND or C");
      continue;
    }
    if (!sc.match('(')) {
      diag(lineno, sc.col(), "missing '('", "'('");
      continue;
    }
    bool bad = false;
    while (true) {
      int ccol = sc.col();
      std::string_view child = sc.ident();
      if (child.empty()) {
        diag(lineno, ccol, "missing child name", "an identifier");
        bad = true;
        break;
      }
      d.children.emplace_back(child);
      d.child_spans.emplace_back(lineno, ccol);
      if (sc.match(',')) continue;
      if (sc.match(')')) break;
      diag(lineno, sc.col(), "malformed child list", "',' or ')'");
      bad = true;
      break;
    }
    if (bad) continue;
    if (!sc.at_end()) {
      diag(lineno, sc.col(), "trailing content after ')'");
      continue;
    }
    doc.decls.push_back(std::move(d));
  }

  if (state == State::kHeader)
    diag(lineno, 1, "missing header", "at, dat or adt <name> {");
  else if (state == State::kBody)
    diag(lineno, 1, "missing closing '}'", "'}'");
  out.doc = std::move(doc);
  return out;
}

LinkResult link_document(const TreeDocument& doc) {
  LinkResult out;
  auto diag = [&](int line, int col, std::string msg) {
    out.diagnostics.push_back({line, col, std::move(msg), {}});
  };

  if (doc.decls.empty()) {
    diag(1, 1, "document declares no nodes");
    return out;
  }
  std::map<std::string, NodeId> index;
  for (size_t i = 0; i < doc.decls.size(); ++i) {
    const Declaration& d = doc.decls[i];
    if (!index.emplace(d.name, static_cast<NodeId>(i)).second)
      diag(d.line, d.col, "duplicate definition of '" + d.name + "'");
  }

  // one node per declaration, ids in declaration order
  AttackTree t;
  for (const Declaration& d : doc.decls) {
    if (d.gate == GateType::kBas)
      t.add_bas(d.name, d.actor);
    else
      t.add_gate(d.gate, {}, d.name, d.actor);
  }
  bool unresolved = false;
  for (size_t i = 0; i < doc.decls.size(); ++i) {
    const Declaration& d = doc.decls[i];
    if (d.gate == GateType::kBas) continue;
    std::vector<NodeId> ch;
    for (size_t j = 0; j < d.children.size(); ++j) {
      auto it = index.find(d.children[j]);
      if (it == index.end()) {
        diag(d.child_spans[j].first, d.child_spans[j].second,
             "unknown node '" + d.children[j] + "'");
        unresolved = true;
      } else {
        ch.push_back(it->second);
      }
    }
    if (!ch.empty()) t.set_children(static_cast<NodeId>(i), std::move(ch));
  }
  if (unresolved || !out.diagnostics.empty()) return out;

  // adt: colors flow down from the root; explicit annotations stay put and
  // the validator reports any mismatch they cause
  if (doc.kind == TreeKind::kAttackDefense) {
    std::vector<uint32_t> indeg = t.in_degrees();
    std::vector<NodeId> roots;
    for (NodeId v = 0; v < t.size(); ++v)
      if (indeg[v] == 0) roots.push_back(v);
    if (roots.size() == 1) {
      std::vector<std::optional<Actor>> color(t.size());
      for (NodeId v = 0; v < t.size(); ++v) color[v] = t.node(v).actor;
      if (!color[roots[0]]) color[roots[0]] = Actor::kProponent;
      std::deque<NodeId> queue{roots[0]};
      std::vector<bool> seen(t.size(), false);
      seen[roots[0]] = true;
      while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        const auto& n = t.node(v);
        for (size_t k = 0; k < n.children.size(); ++k) {
          NodeId c = n.children[k];
          Actor inherited = *color[v];
          if (n.gate == GateType::kCounter && k == 1)
            inherited = inherited == Actor::kProponent ? Actor::kOpponent
                                                       : Actor::kProponent;
          if (!color[c]) color[c] = inherited;
          if (!seen[c]) {
            seen[c] = true;
            queue.push_back(c);
          }
        }
      }
      for (NodeId v = 0; v < t.size(); ++v)
        t.set_actor(v, color[v] ? color[v] : Actor::kProponent);
    }
  }

  std::vector<Violation> viols;
  switch (doc.kind) {
    case TreeKind::kAttack: viols = validate(t); break;
    case TreeKind::kDynamic: viols = validate_dat(t); break;
    case TreeKind::kAttackDefense: viols = validate_adt(t); break;
  }
  for (const Violation& v : viols) {
    if (v.node != kInvalidNode && v.node < doc.decls.size())
      diag(doc.decls[v.node].line, doc.decls[v.node].col, v.message);
    else
      diag(1, 1, v.message);
  }
  if (!out.diagnostics.empty()) return out;

  AnchoredTree at;
  for (NodeId v = 0; v < t.size(); ++v)
    if (t.node(v).gate == GateType::kBas) at.anchor.push_back(v);
  at.tree = std::move(t);
  out.tree = std::move(at);
  return out;
}

LinkResult parse_tree(std::string_view text) {
  ParseResult pr = parse_document(text);
  if (!pr.doc || !pr.diagnostics.empty())
    return {std::nullopt, std::move(pr.diagnostics)};
  return link_document(*pr.doc);
}

std::string print_document(const TreeDocument& doc) {
  std::string out = std::string(kind_word(doc.kind)) + " " +
                    (doc.name.empty() ? "t" : doc.name) + " {\n";
  for (const Declaration& d : doc.decls) {
    out += "  " + d.name;
    if (d.actor) out += std::string("@") + actor_letter(*d.actor);
    if (d.gate == GateType::kBas) {
      out += ": bas\n";
      continue;
    }
    out += std::string(" = ") + gate_name(d.gate) + "(";
    for (size_t j = 0; j < d.children.size(); ++j) {
      if (j) out += ", ";
      out += d.children[j];
    }
    out += ")\n";
  }
  out += "}\n";
  return out;
}

TreeDocument to_document(const AnchoredTree& at, const std::string& name,
                         TreeKind kind) {
  TreeDocument doc;
  doc.kind = kind;
  doc.name = name;

  // stable unique identifiers: keep usable stored names, disambiguate with a
  // numeric suffix, invent g<k>/a<k> for the rest
  std::vector<std::string> id(at.tree.size());
  std::map<std::string, int> taken;
  auto christen = [&](NodeId v) {
    const auto& n = at.tree.node(v);
    std::string base = n.name;
    bool usable = !base.empty() && ident_start(base[0]);
    for (char c : base)
      if (!ident_char(c)) usable = false;
    if (usable && (base == "at" || base == "dat" || base == "adt"))
      usable = false;  // would collide with a header keyword at re-parse
    if (!usable)
      base = (n.gate == GateType::kBas ? "a" : "g") + std::to_string(v);
    auto [it, fresh] = taken.try_emplace(base, 0);
    if (!fresh) {
      std::string alt;
      do {
        alt = base + "_" + std::to_string(++it->second);
      } while (taken.count(alt));
      taken.emplace(alt, 0);
      base = alt;
    }
    id[v] = base;
  };

  // gates root-first, then the BASs in anchor order (their declaration
  // order IS the anchoring on re-parse)
  std::vector<NodeId> topo = at.tree.topo_order();
  std::vector<NodeId> order;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it)
    if (at.tree.node(*it).gate != GateType::kBas) order.push_back(*it);
  for (NodeId v : at.anchor) order.push_back(v);
  for (NodeId v : order) christen(v);

  bool colored = kind == TreeKind::kAttackDefense;
  for (NodeId v : order) {
    const auto& n = at.tree.node(v);
    Declaration d;
    d.name = id[v];
    d.gate = n.gate;
    if (colored) d.actor = n.actor;
    for (NodeId c : n.children) d.children.push_back(id[c]);
    doc.decls.push_back(std::move(d));
  }
  return doc;
}

ValuesResult parse_values_csv(std::string_view text) {
  ValuesResult out;
  auto diag = [&](int line, int col, std::string msg, std::string exp = {}) {
    out.diagnostics.push_back({line, col, std::move(msg), std::move(exp)});
  };
  auto trim = [](std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };

  int lineno = 0;
  size_t cursor = 0;
  while (cursor <= text.size()) {
    size_t nl = text.find('\n', cursor);
    std::string_view raw = text.substr(
        cursor, nl == std::string_view::npos ? text.size() - cursor
                                             : nl - cursor);
    cursor = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    lineno++;
    std::string_view line = strip_comment(raw);
    if (blank(line)) continue;
    size_t comma = line.find(',');
    if (comma == std::string_view::npos) {
      diag(lineno, 1, "malformed row", "name,value");
      continue;
    }
    std::string name(trim(line.substr(0, comma)));
    std::string value(trim(line.substr(comma + 1)));
    if (name.empty()) {
      diag(lineno, 1, "missing name");
      continue;
    }
    if (value.empty()) {
      diag(lineno, static_cast<int>(comma) + 2, "missing value",
           "a number or inf");
      continue;
    }
    double v = 0.0;
    try {
      size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) {
        diag(lineno, static_cast<int>(comma) + 2,
             "trailing content after the value");
        continue;
      }
    } catch (const std::invalid_argument&) {
      diag(lineno, static_cast<int>(comma) + 2, "unreadable value",
           "a number or inf");
      continue;
    } catch (const std::out_of_range&) {
      diag(lineno, static_cast<int>(comma) + 2, "value out of range");
      continue;
    }
    if (std::isnan(v)) {
      diag(lineno, static_cast<int>(comma) + 2, "NaN is not a value");
      continue;
    }
    if (!out.values.emplace(name, v).second)
      diag(lineno, 1, "duplicate value for '" + name + "'");
  }
  return out;
}

}  // namespace atcalc
