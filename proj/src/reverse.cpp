#include "dynsys/reverse.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace dynsys {

const char* frontier_name(Frontier f) {
  switch (f) {
    case Frontier::Complete: return "complete";
    case Frontier::TruncatedByDepth: return "truncated_by_depth";
    case Frontier::TruncatedByCap: return "truncated_by_cap";
  }
  return "?";
}

namespace {

// Round trip: a candidate counts only if stepping it forward lands exactly
// on m again. This holds for every family the DSL can express, so families
// with value-dependent guards (like the pow2 exponent family) need no
// special casing.
bool round_trips(const SystemDef& sys, Nat candidate, Nat m) {
  StepResult step = eval_forward(sys, candidate);
  return step.kind == StepResult::Kind::Next && !step.leaves_domain && step.value == m;
}

struct Collector {
  const SystemDef& sys;
  Nat m;
  const ReverseCaps& caps;
  PredecessorList out;

  void consider(EvalResult r) {
    if (r.status == EvalStatus::Limit) {
      out.cap_truncated = true;
      return;
    }
    if (r.status != EvalStatus::Ok) return;  // not integral here: no candidate
    Nat n{r.value};
    if (caps.value_cap && n > *caps.value_cap) {
      out.cap_truncated = true;
      return;
    }
    if (n == m) return;  // the fixed point's self-predecessor is excluded
    if (!admits(sys, n)) return;
    if (!round_trips(sys, n, m)) return;
    if (std::find(out.values.begin(), out.values.end(), n) != out.values.end()) {
      ++out.duplicates_rejected;
      return;
    }
    out.values.push_back(n);
  }
};

}  // namespace

PredecessorList predecessors(const SystemDef& sys, Nat m, const ReverseCaps& caps) {
  if (!sys.has_reverse()) {
    throw std::invalid_argument("system " + sys.name + " declares no reverse family");
  }
  if (!admits(sys, m)) {
    throw std::domain_error("predecessors: value " + m.str() + " is not admitted by " + sys.name);
  }
  Collector c{sys, m, caps, {}};
  for (const ReverseFamily& fam : sys.reverse) {
    switch (fam.kind) {
      case ReverseFamily::Kind::FiniteList:
        for (const Program& prog : fam.list_progs) c.consider(prog.eval(m.v));
        break;
      case ReverseFamily::Kind::Exponent: {
        c.out.unbounded_family = true;
        if (fam.param_lower.v > static_cast<u128>(caps.param_cap)) {
          c.out.cap_truncated = true;
          break;
        }
        for (std::uint64_t p = static_cast<std::uint64_t>(fam.param_lower.v);
             p <= caps.param_cap; ++p) {
          c.consider(fam.prog.eval(m.v, static_cast<u128>(p)));
        }
        c.out.cap_truncated = true;  // parameters beyond the cap remain
        break;
      }
      case ReverseFamily::Kind::Prime: {
        c.out.unbounded_family = true;
        std::uint64_t lower = fam.param_lower.fits_u64()
                                  ? static_cast<std::uint64_t>(fam.param_lower.v)
                                  : UINT64_MAX;
        if (lower >= caps.param_cap) {
          c.out.cap_truncated = true;
          break;
        }
        for (std::uint64_t p = lower + 1; p <= caps.param_cap; ++p) {
          if (!is_prime_u64(p)) continue;
          c.consider(fam.prog.eval(m.v, static_cast<u128>(p)));
        }
        c.out.cap_truncated = true;  // primes beyond the cap remain
        break;
      }
    }
  }
  return c.out;
}

std::vector<std::vector<std::uint32_t>> ReverseTree::children() const {
  std::vector<std::vector<std::uint32_t>> kids(nodes.size());
  for (std::uint32_t i = 1; i < nodes.size(); ++i) {
    kids[static_cast<std::uint32_t>(nodes[i].parent)].push_back(i);
  }
  return kids;
}

std::optional<std::uint32_t> ReverseTree::find(Nat value) const {
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].value == value) return i;
  }
  return std::nullopt;
}

ReverseTree build_reverse_tree(const SystemDef& sys, Nat root, std::uint32_t depth,
                               const ReverseCaps& caps) {
  if (!admits(sys, root)) {
    throw std::domain_error("build_reverse_tree: root " + root.str() + " is not admitted");
  }
  ReverseTree tree;
  tree.root = root;
  tree.depth = depth;
  tree.nodes.push_back({root, -1, 0, depth == 0 ? Frontier::TruncatedByDepth : Frontier::Complete});

  std::unordered_set<u128, NatHashRaw> seen;
  seen.insert(root.v);

  // BFS by index; nodes are appended in discovery order so depth-of is the
  // minimal forward step count to the root.
  for (std::uint32_t i = 0; i < tree.nodes.size(); ++i) {
    std::uint32_t d = tree.nodes[i].depth;
    if (d == depth) {
      tree.nodes[i].frontier = Frontier::TruncatedByDepth;
      continue;
    }
    if (tree.nodes.size() >= caps.max_nodes) {
      tree.nodes[i].frontier = Frontier::TruncatedByCap;
      tree.cap_truncated = true;
      continue;
    }
    PredecessorList preds = predecessors(sys, tree.nodes[i].value, caps);
    if (preds.cap_truncated) {
      tree.nodes[i].frontier = Frontier::TruncatedByCap;
      tree.cap_truncated = true;
    } else {
      tree.nodes[i].frontier = Frontier::Complete;
    }
    tree.duplicates_rejected += preds.duplicates_rejected;
    for (Nat p : preds.values) {
      if (!seen.insert(p.v).second) {
        // A value reachable through two parents would contradict the single
        // forward successor; count it rather than corrupting the tree.
        ++tree.duplicates_rejected;
        continue;
      }
      tree.nodes.push_back({p, static_cast<std::int32_t>(i), d + 1, Frontier::Complete});
    }
  }
  return tree;
}

EtaProfile eta_profile(const SystemDef& sys, const std::vector<Nat>& nodes,
                       const ReverseCaps& caps) {
  EtaProfile profile;
  profile.entries.reserve(nodes.size());
  for (Nat node : nodes) {
    PredecessorList preds = predecessors(sys, node, caps);
    profile.entries.push_back({node, static_cast<std::uint32_t>(preds.values.size()),
                               preds.unbounded_family, preds.cap_truncated});
  }
  return profile;
}

CoverageResult coverage_check(const SystemDef& sys, Nat root, Nat bound, std::uint32_t depth,
                              const ReverseCaps& caps) {
  CoverageResult result;
  result.tree = build_reverse_tree(sys, root, depth, caps);
  std::unordered_set<u128, NatHashRaw> in_tree;
  for (const ReverseTreeNode& n : result.tree.nodes) in_tree.insert(n.value.v);
  for (u128 v = 0; v <= bound.v; ++v) {
    if (!admits(sys, Nat{v})) continue;
    if (in_tree.count(v)) {
      result.covered.push_back(Nat{v});
    } else {
      result.uncovered.push_back(Nat{v});
    }
  }
  return result;
}

}  // namespace dynsys
