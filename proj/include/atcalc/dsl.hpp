#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atcalc/tree.hpp"

namespace atcalc {

// A problem in the input, anchored to a 1-based line/column. `expected`
// lists what would have been legal at that point, when that is meaningful.
struct Diagnostic {
  int line = 0;
  int col = 0;
  std::string message;
  std::string expected;
};

std::string to_string(const Diagnostic& d);

// One `name = GATE(children...)` or `name : bas` statement, with enough
// span information to point later errors at the right token.
struct Declaration {
  std::string name;
  GateType gate = GateType::kBas;  // kBas for `: bas` lines
  std::optional<Actor> actor;      // explicit @p/@o annotation
  std::vector<std::string> children;
  int line = 0, col = 0;
  std::vector<std::pair<int, int>> child_spans;  // line/col per child
};

// Parsed but not yet linked tree source: the declarations in textual order.
// The order matters twice: one declaration per name, and the `: bas` lines
// define the anchoring (first BAS declared = anchor index 0).
struct TreeDocument {
  TreeKind kind = TreeKind::kAttack;
  std::string name;
  std::vector<Declaration> decls;
};

// Grammar, line-based:
//   at|dat|adt <name> {
//     <id>[@p|@o] = OR|AND|SAND(<id>, <id>, ...)
//     <id>[@p|@o] = C(<id>, <id>)
//     <id>[@p|@o] : bas
//     # comment
//   }
// Repeated child names create parallel edges. A malformed line is reported
// and skipped, so one pass can collect several diagnostics.
struct ParseResult {
  std::optional<TreeDocument> doc;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return doc.has_value() && diagnostics.empty(); }
};
ParseResult parse_document(std::string_view text);

// Resolves names to nodes and checks the kind-specific invariants (SAND only
// in dat, colors and C only in adt, single root, no cycles). For adt
// documents, colors are inferred top-down from the root (default proponent);
// explicit annotations win and inconsistencies are reported.
struct LinkResult {
  std::optional<AnchoredTree> tree;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return tree.has_value() && diagnostics.empty(); }
};
LinkResult link_document(const TreeDocument& doc);

// parse + link in one go, diagnostics merged.
LinkResult parse_tree(std::string_view text);

// Inverse pair for round-tripping: print emits the grammar above (gates
// root-first, then the BASs in anchor order so the anchoring survives);
// to_document rebuilds the declaration list from a linked tree. Nodes
// without names get stable generated ones.
std::string print_document(const TreeDocument& doc);
TreeDocument to_document(const AnchoredTree& at, const std::string& name,
                         TreeKind kind);
inline TreeDocument to_document(const AnchoredTree& at,
                                const std::string& name) {
  return to_document(at, name, at.tree.kind());
}

// `name,value` per line, `inf` accepted for the extended reals, `#`
// comments and blank lines ignored. NaN and duplicate names are errors.
struct ValuesResult {
  std::map<std::string, double> values;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};
ValuesResult parse_values_csv(std::string_view text);

}  // namespace atcalc
