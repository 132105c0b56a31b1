#pragma once

#include <string>

#include "atcalc/tree.hpp"

namespace atcalc {

// Canonical byte serialization of an anchored tree: two anchored trees yield
// equal strings iff they are anchor-isomorphic (same DAG shape up to node
// renaming, preserving gates, actors, SAND child order and anchor indices).
//
// Node keys are computed bottom-up -- a BAS keys on its anchor index, a gate
// on its type plus the child key multiset (child key list for order-aware
// gates) -- and then refined with parent context until the partition of
// nodes into key classes stabilizes. Serialization walks from the root with
// children in key order, numbering nodes at first visit, so a node shared
// twice and two duplicate nodes serialize differently. Nodes still tied
// after refinement are interchangeable, so the remaining first-occurrence
// tie-break does not affect the output.
//
// Throws std::invalid_argument when validate(at) reports violations.
std::string canonical_form(const AnchoredTree& at);

bool anchor_isomorphic(const AnchoredTree& a, const AnchoredTree& b);

}  // namespace atcalc
