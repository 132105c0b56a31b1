#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace atcalc {

using NodeId = uint32_t;
inline constexpr NodeId kInvalidNode = static_cast<NodeId>(-1);

// Gate vocabulary. kSand only appears in dynamic trees, kCounter only in
// attack-defense trees; plain attack trees use the first three.
enum class GateType : uint8_t { kBas, kOr, kAnd, kSand, kCounter };

// Attack-defense actor: proponent (attacker) or opponent (defender).
enum class Actor : uint8_t { kProponent, kOpponent };

enum class TreeKind : uint8_t { kAttack, kDynamic, kAttackDefense };

const char* gate_name(GateType g);
char actor_letter(Actor a);

// Rooted DAG multigraph with typed gates. Edges live in per-node child lists;
// a repeated entry is a parallel edge. Child order is meaningful only for
// SAND (sequential order) and C (same-actor child first); OR/AND children are
// an unordered multiset and the stored order is just the construction order.
//
// Instances are plain values: build them up with add_bas/add_gate, then treat
// them as immutable. All free functions below take const references and are
// safe to call concurrently on shared trees.
class AttackTree {
 public:
  struct Node {
    GateType gate = GateType::kBas;
    std::vector<NodeId> children;
    std::string name;
    std::optional<Actor> actor;
  };

  NodeId add_bas(std::string name = {}, std::optional<Actor> actor = {});
  NodeId add_gate(GateType gate, std::vector<NodeId> children,
                  std::string name = {}, std::optional<Actor> actor = {});

  size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const Node& node(NodeId v) const;
  const std::vector<Node>& nodes() const { return nodes_; }

  void set_name(NodeId v, std::string name);
  void set_actor(NodeId v, std::optional<Actor> actor);
  void set_children(NodeId v, std::vector<NodeId> children);

  // The unique node without incoming edges. Throws std::logic_error if the
  // tree does not have exactly one; run validate() first on untrusted input.
  NodeId root() const;

  std::vector<NodeId> bas_nodes() const;       // in id order
  std::vector<uint32_t> in_degrees() const;    // counting edge multiplicity
  std::vector<NodeId> topo_order() const;      // children before parents
  TreeKind kind() const;

 private:
  std::vector<Node> nodes_;
};

struct Violation {
  std::string message;
  NodeId node = kInvalidNode;
};

// Structural checks for the three tree flavours. Every violated invariant is
// returned (empty result = valid); nothing throws.
std::vector<Violation> validate(const AttackTree& t);
std::vector<Violation> validate_dat(const AttackTree& t);
std::vector<Violation> validate_adt(const AttackTree& t);

// Activation vector over the anchored BASs; bit i corresponds to the BAS with
// anchor index i. Packed into a single word for up to 64 BASs, spilling into
// an overflow array beyond that.
class AttackVector {
 public:
  AttackVector() = default;
  explicit AttackVector(uint32_t n);
  static AttackVector from_mask(uint32_t n, uint64_t mask);

  uint32_t size() const { return n_; }
  bool get(uint32_t i) const;
  void set(uint32_t i, bool value);
  uint64_t mask() const;  // requires n <= 64
  uint32_t count() const;

  // componentwise >=
  bool dominates(const AttackVector& other) const;

  friend bool operator==(const AttackVector&, const AttackVector&) = default;
  friend std::strong_ordering operator<=>(const AttackVector&,
                                          const AttackVector&) = default;

 private:
  uint32_t n_ = 0;
  uint64_t word_ = 0;
  std::vector<uint64_t> ext_;
};

std::string to_string(const AttackVector& b);

// An attack tree plus an anchoring: anchor[i] is the BAS carrying anchor
// index i (0-based here; 1-based in the user-facing text formats).
struct AnchoredTree {
  AttackTree tree;
  std::vector<NodeId> anchor;

  size_t arity() const { return anchor.size(); }
  // node id -> anchor index, or -1 for gates
  std::vector<int32_t> anchor_of_node() const;
};

// Anchors the BASs in node-id order.
AnchoredTree with_default_anchor(AttackTree tree);

std::vector<Violation> validate(const AnchoredTree& at);

inline constexpr uint32_t kDefaultEnumCap = 20;

// f_T(b, v) of Definition "structure function": BAS reads its bit, AND/OR
// fold the child multiset. Each node is evaluated once. Parallel edges under
// AND/OR collapse (conjunction and disjunction are idempotent), which is the
// one reading the recursion admits.
bool structure_function(const AnchoredTree& at, const AttackVector& b,
                        NodeId v);

// Success bit per activation mask, for all 2^n masks (n <= cap, else throws
// std::length_error). Index = mask value with bit i = anchor i.
std::vector<bool> success_table(const AnchoredTree& at,
                                uint32_t cap = kDefaultEnumCap);

// Suc_T by exhaustive enumeration, in mask order.
std::vector<AttackVector> successful_attacks(const AnchoredTree& at,
                                             uint32_t cap = kDefaultEnumCap);

// Minimal elements of Suc_T under the componentwise partial order.
std::vector<AttackVector> minimal_attacks(const AnchoredTree& at,
                                          uint32_t cap = kDefaultEnumCap);

}  // namespace atcalc
