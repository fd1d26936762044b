#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynsys/funcgraph.hpp"
#include "dynsys/reverse.hpp"
#include "dynsys/trajectory.hpp"

namespace dynsys {

enum class Verdict : std::uint8_t {
  Pass,
  // Unbounded predecessor families compared equal under identical caps; the
  // unbounded claim itself is not boundedly verifiable, so this is kept
  // distinct from Pass and never overclaims.
  PassUnderCaps,
  Fail,
  Inconclusive,
};

const char* verdict_name(Verdict v);

struct CriterionScope {
  std::optional<std::pair<Nat, Nat>> window;
  std::optional<std::uint32_t> depth;
  ReverseCaps caps;
  std::uint64_t sample_seed = 1;
};

/// Verdict plus the evidence needed to re-check it independently: witnesses
/// are concrete values/pairs, canonical forms are the compared encodings.
/// Pass is only emitted when no cap truncation touched the compared region;
/// Fail always carries a robust witness.
struct CriterionReport {
  int criterion = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  CriterionScope scope;
  std::vector<std::pair<Nat, Nat>> witness_pairs;
  std::vector<Nat> witness_values;
  std::map<std::string, std::string> canonical_forms;
  std::map<std::string, std::uint64_t> counts;
  std::vector<std::string> notes;
};

/// AHU form of a reverse tree; cap-truncated nodes carry the "[T]" atom,
/// depth-frontier nodes are plain leaves.
std::string canonical_form(const ReverseTree& tree);

/// Default sample set: every admitted value <= 1000 plus 100 pseudo-random
/// admitted values <= 10^6 drawn from the given seed.
std::vector<Nat> default_sample_nodes(const SystemDef& sys, std::uint64_t seed);

/// Criterion 1: isomorphic to a convergent reference system, compared by
/// reverse trees from both fixed points to the given depth.
CriterionReport check_c1_isomorphic(const SystemDef& a, const SystemDef& b, std::uint32_t depth,
                                    const ReverseCaps& caps = {});

/// Criterion 2: the reverse tree from the fixed point needs all admitted
/// values <= bound. Uncovered values are each cross-checked forward.
CriterionReport check_c2_coverage(const SystemDef& sys, Nat bound, std::uint32_t depth,
                                  const ReverseCaps& caps = {}, const Limits& limits = {});

/// Criterion 3: the structure is self-similar: every sampled knot's branch
/// matches the fixed point's tree at the same depth.
CriterionReport check_c3_self_similar(const SystemDef& sys, std::uint32_t depth,
                                      const std::vector<Nat>& samples,
                                      const ReverseCaps& caps = {});

/// Criterion 4: every knot has the same number of direct predecessors.
CriterionReport check_c4_eta(const SystemDef& sys, const std::vector<Nat>& nodes,
                             const ReverseCaps& caps = {});

/// Criterion 5: the graph consists entirely of branches; peeling them
/// (block 4) must leave exactly the single fixed knot.
CriterionReport check_c5_branch_peel(FuncGraph g);

/// Criterion 6: every admitted knot above the (minimal) fixed point has a
/// smaller successor.
CriterionReport check_c6_descent(const SystemDef& sys, Nat lo, Nat hi);

}  // namespace dynsys
