#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynsys/sysdef.hpp"

namespace dynsys {

struct ReverseCaps {
  // Largest family parameter value tried (exponent mu, prime p).
  std::uint64_t param_cap = 24;
  // Largest predecessor value kept; unset means unbounded (enumeration is
  // still finite per node: lists are finite and parameters are capped).
  std::optional<Nat> value_cap;
  // Tree node budget: expansion beyond this marks the remaining frontier
  // cap-truncated instead of growing without bound.
  std::uint64_t max_nodes = 1'000'000;
};

struct PredecessorList {
  std::vector<Nat> values;  // family order, then enumeration order within
  // Candidates beyond the caps may exist (parameter cap reached on a
  // parametric family, value cap or overflow excluded a candidate).
  bool cap_truncated = false;
  // Some family of the system is parametric, so the true count may be
  // unbounded.
  bool unbounded_family = false;
  std::uint32_t duplicates_rejected = 0;
};

/// Enumerates the direct predecessors of an admitted m: every returned n is
/// admitted, integral, satisfies eval_forward(n) = Next(m), and differs from
/// m (the fixed point's self-loop is excluded). Throws std::invalid_argument
/// when the system declares no reverse family, std::domain_error when m is
/// not admitted.
PredecessorList predecessors(const SystemDef& sys, Nat m, const ReverseCaps& caps = {});

enum class Frontier : std::uint8_t { Complete, TruncatedByDepth, TruncatedByCap };

const char* frontier_name(Frontier f);

struct ReverseTreeNode {
  Nat value;
  std::int32_t parent = -1;  // index into nodes; parent = forward successor
  std::uint32_t depth = 0;
  Frontier frontier = Frontier::Complete;
};

/// Bounded-depth predecessor tree, breadth-first, no duplicate values.
struct ReverseTree {
  Nat root;
  std::uint32_t depth = 0;
  std::vector<ReverseTreeNode> nodes;  // BFS order, nodes[0] is the root
  std::uint32_t duplicates_rejected = 0;
  bool cap_truncated = false;  // any node's enumeration was cap-truncated

  std::vector<std::vector<std::uint32_t>> children() const;
  std::optional<std::uint32_t> find(Nat value) const;
};

ReverseTree build_reverse_tree(const SystemDef& sys, Nat root, std::uint32_t depth,
                               const ReverseCaps& caps = {});

struct EtaEntry {
  Nat node;
  std::uint32_t count = 0;
  bool unbounded_family = false;
  bool cap_truncated = false;
};

struct EtaProfile {
  std::vector<EtaEntry> entries;  // input order
};

EtaProfile eta_profile(const SystemDef& sys, const std::vector<Nat>& nodes,
                       const ReverseCaps& caps = {});

struct CoverageResult {
  std::vector<Nat> covered;    // ascending
  std::vector<Nat> uncovered;  // ascending
  ReverseTree tree;
};

/// Partitions admitted values <= bound by membership in the depth-d reverse
/// tree of `root`.
CoverageResult coverage_check(const SystemDef& sys, Nat root, Nat bound, std::uint32_t depth,
                              const ReverseCaps& caps = {});

}  // namespace dynsys
