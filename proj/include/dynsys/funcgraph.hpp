#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynsys/nat.hpp"
#include "dynsys/sysdef.hpp"

namespace dynsys {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = UINT32_MAX;

struct Succ {
  enum class Kind : std::uint8_t {
    Node,      // points at another knot
    Boundary,  // successor exists but lies outside the window
    None,      // sink: fixed point (or stuck value in a partial system)
  };
  Kind kind = Succ::Kind::None;
  NodeId to = kNoNode;
  Nat boundary_value;

  bool operator==(const Succ& o) const {
    return kind == o.kind && to == o.to && boundary_value == o.boundary_value;
  }
};

struct ReductionStep {
  enum class Op : std::uint8_t {
    Block1Contract,
    Block1Absorb,
    Block2CycleToFixed,
    Block3Prune,
    Block4RemoveBranch,
    Block5Permute,
  };
  Op op;
  std::vector<NodeId> nodes;                       // chain / cycle / node / delegate
  std::vector<std::pair<Nat, Nat>> label_map;      // Block5Permute only
  std::vector<NodeId> removed;                     // filled by the operation
};

int block_number(ReductionStep::Op op);
const char* op_name(ReductionStep::Op op);

/// Explicit finite functional graph: out-degree <= 1 everywhere, optional
/// unique labels, and a replayable log of reduction-block applications.
/// Node ids stay stable across removals.
class FuncGraph {
 public:
  /// Materializes a system on [lo, hi]: one node per admitted value, labels
  /// are the values. A self-fixed value keeps its self-edge; successors
  /// outside the window or outside the admitted set become Boundary.
  static FuncGraph from_system(const SystemDef& sys, Nat lo, Nat hi);

  NodeId add_node();
  NodeId add_node(Nat label);
  void set_succ_node(NodeId from, NodeId to);
  void set_succ_none(NodeId from);
  void set_succ_boundary(NodeId from, Nat value);

  std::size_t node_count() const { return alive_count_; }
  std::size_t id_limit() const { return succ_.size(); }
  bool alive(NodeId id) const { return id < exists_.size() && exists_[id]; }
  const Succ& succ(NodeId id) const { return succ_[id]; }
  std::uint32_t in_degree(NodeId id) const { return in_deg_[id]; }
  bool labeled() const { return labeled_; }
  Nat label(NodeId id) const { return labels_[id]; }
  std::optional<NodeId> find_label(Nat label) const;
  std::vector<NodeId> node_ids() const;  // alive, ascending id

  // --- Reduction blocks. Guard violations throw std::invalid_argument and
  // --- leave the graph untouched.

  /// Removes the chain interior v2..vk; v1 takes over the edge to w (the
  /// node after vk). Interior knots must have in-degree exactly one and no
  /// chain member may lie on a cycle.
  void block1_contract_chain(std::span<const NodeId> chain);

  /// Collapses the whole chain into its successor w: every edge entering the
  /// chain is redirected to w and all chain knots are removed. Interior
  /// in-degrees are unrestricted. This is the form the even-run reduction
  /// needs: the run's odd endpoint survives.
  void block1_absorb_chain(std::span<const NodeId> chain);

  /// Replaces a cycle (listed in successor order; length 1 = self-loop) by a
  /// pointerless fixed knot. Survivor: minimal label when labeled, else
  /// minimal id. Returns the survivor.
  NodeId block2_cycle_to_fixed(std::span<const NodeId> cycle);

  /// Removes a knot with no input. Sinks (fixed points) are protected.
  void block3_prune_no_input(NodeId node);

  /// Removes a delegate together with its whole predecessor closure. The
  /// delegate must not be a fixed point or cycle member and its successor
  /// must remain in the graph.
  void block4_remove_branch(NodeId delegate);

  /// Permutes labels; mapping entries are (old, new), identity elsewhere.
  /// The completed map must be a bijection on the current label set.
  void block5_permute_labels(std::vector<std::pair<Nat, Nat>> mapping);

  const std::vector<ReductionStep>& log() const { return log_; }

  // --- Roots.

  struct Root {
    enum class Kind : std::uint8_t { Fixed, Cycle, Boundary };
    Kind kind;
    NodeId fixed_node = kNoNode;         // Fixed
    std::vector<NodeId> cycle_nodes;     // Cycle: successor order from min label/id
    Nat boundary_value;                  // Boundary: exit value (exits merge by value)
    std::uint64_t member_count = 0;      // nodes rooted here
  };
  struct RootsInfo {
    std::vector<Root> roots;
    std::vector<std::uint32_t> root_of;   // per node id; kNoNode-sized slots for dead ids
    std::vector<bool> cycle_member;       // length >= 2 cycles only
  };
  RootsInfo roots() const;

  // --- Label-free structure.

  struct StructureEntry {
    Root::Kind kind;
    std::string anchor;  // fixed label / boundary value, for reading reports
    std::string form;    // AHU encoding
  };
  struct Structure {
    std::vector<StructureEntry> entries;        // sorted by (form, kind, anchor)
    std::vector<std::vector<NodeId>> cycles;    // uncollapsed cycles, reported not encoded
  };
  Structure strip_labels() const;

  bool identical(const FuncGraph& other) const;
  /// Re-checks every structural invariant; throws std::logic_error on damage.
  void check_consistency() const;

  std::vector<std::vector<NodeId>> reverse_adjacency() const;

 private:
  std::vector<bool> exists_;
  std::vector<Succ> succ_;
  std::vector<Nat> labels_;
  std::vector<std::uint32_t> in_deg_;
  std::unordered_map<u128, NodeId, NatHashRaw> label_index_;
  bool labeled_ = false;
  std::size_t alive_count_ = 0;
  std::vector<ReductionStep> log_;

  void require_alive(NodeId id, const char* who) const;
  void set_succ_internal(NodeId from, Succ s);
  void remove_node(NodeId id);
  // Absorb with preconditions already established; `radj` is kept usable.
  void absorb_unchecked(std::span<const NodeId> chain, NodeId w,
                        std::vector<std::vector<NodeId>>& radj,
                        std::vector<NodeId>* redirected_out);

  friend void contract_even_chains(FuncGraph& g);
};

/// Applies a recorded log to a copy of `original`; replaying a graph's own
/// log reproduces it exactly.
FuncGraph replay_log(const FuncGraph& original, const std::vector<ReductionStep>& log);

// --- Composite reductions (checked primitives inside, each logged). ---

/// Collapses every maximal run of even-labeled knots into its odd endpoint
/// (Block 1 absorb form). Any cycle must be collapsed first (Block 2).
void contract_even_chains(FuncGraph& g);

/// Repeatedly applies Block 3. When `sys` has reverse families, a knot with
/// an admitted out-of-window predecessor (under `probe_cap` times the window
/// top) is treated as having input, so window-edge artifacts are not pruned.
struct PruneLoopResult {
  std::vector<Nat> removed_labels;
  std::uint64_t passes = 0;
};
PruneLoopResult prune_no_input_loop(FuncGraph& g, const SystemDef* sys = nullptr,
                                    std::uint64_t param_cap = 24);

}  // namespace dynsys
