#include "dynsys/criteria.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dynsys/canonical.hpp"

namespace dynsys {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::PassUnderCaps: return "pass_under_caps";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string canonical_form(const ReverseTree& tree) {
  auto children = tree.children();
  std::vector<bool> cap(tree.nodes.size(), false);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    cap[i] = tree.nodes[i].frontier == Frontier::TruncatedByCap;
  }
  return ahu_encode(children, 0, cap);
}

std::vector<Nat> default_sample_nodes(const SystemDef& sys, std::uint64_t seed) {
  std::vector<Nat> nodes;
  for (u128 v = 0; v <= 1000; ++v) {
    if (admits(sys, Nat{v})) nodes.push_back(Nat{v});
  }
  // Draws come straight from the engine (modulo), not from
  // uniform_int_distribution, so samples are identical across standard
  // libraries for a given seed.
  std::mt19937_64 rng(seed);
  std::size_t want = nodes.size() + 100;
  std::uint64_t attempts = 0;
  while (nodes.size() < want && attempts < 1'000'000) {
    ++attempts;
    Nat candidate = Nat::of(rng() % 1'000'001);
    if (!admits(sys, candidate)) continue;
    if (std::find(nodes.begin(), nodes.end(), candidate) != nodes.end()) continue;
    nodes.push_back(candidate);
  }
  return nodes;
}

namespace {

// Bounded-comparison facts about one reverse tree.
struct TreeFacts {
  const ReverseTree* tree;
  std::vector<std::vector<std::uint32_t>> children;  // sorted by child form
  std::vector<std::string> form;                     // AHU with cap atoms
  std::vector<bool> own_cap;                         // this node's enumeration truncated
  std::vector<bool> sub_cap;                         // truncation anywhere in subtree
};

TreeFacts make_facts(const ReverseTree& tree) {
  TreeFacts f;
  f.tree = &tree;
  f.children = tree.children();
  std::size_t n = tree.nodes.size();
  f.form.resize(n);
  f.own_cap.resize(n);
  f.sub_cap.resize(n);
  // BFS order guarantees children have larger indices; fill backwards.
  for (std::size_t i = n; i-- > 0;) {
    f.own_cap[i] = tree.nodes[i].frontier == Frontier::TruncatedByCap;
    bool sub = f.own_cap[i];
    std::vector<std::string> parts;
    parts.reserve(f.children[i].size() + 1);
    for (std::uint32_t c : f.children[i]) {
      parts.push_back(f.form[c]);
      sub = sub || f.sub_cap[c];
    }
    if (f.own_cap[i]) parts.emplace_back(kTruncatedAtom);
    std::sort(parts.begin(), parts.end());
    std::string form = "(";
    for (auto& p : parts) form += p;
    form += ")";
    f.form[i] = std::move(form);
    f.sub_cap[i] = sub;
    std::sort(f.children[i].begin(), f.children[i].end(),
              [&](std::uint32_t a, std::uint32_t b) { return f.form[a] < f.form[b]; });
  }
  return f;
}

enum class CmpOutcome { Equal, RobustDiff, Unknown };

struct CmpResult {
  CmpOutcome outcome = CmpOutcome::Equal;
  std::string path;          // child indices in sorted-form order, e.g. "/2/0"
  std::string detail;
  std::string form_a, form_b;
};

// Sound three-way comparison: RobustDiff never flips with larger caps, Equal
// is only reported for cap-free regions.
CmpResult compare_nodes(const TreeFacts& A, const TreeFacts& B, std::uint32_t a, std::uint32_t b,
                        const std::string& path) {
  if (!A.sub_cap[a] && !B.sub_cap[b]) {
    if (A.form[a] == B.form[b]) return {CmpOutcome::Equal, path, "", A.form[a], B.form[b]};
    const auto& ka = A.children[a];
    const auto& kb = B.children[b];
    if (ka.size() != kb.size()) {
      return {CmpOutcome::RobustDiff, path,
              "child counts " + std::to_string(ka.size()) + " vs " + std::to_string(kb.size()),
              A.form[a], B.form[b]};
    }
    for (std::size_t i = 0; i < ka.size(); ++i) {
      if (A.form[ka[i]] != B.form[kb[i]]) {
        return compare_nodes(A, B, ka[i], kb[i], path + "/" + std::to_string(i));
      }
    }
    return {CmpOutcome::RobustDiff, path, "internal form mismatch", A.form[a], B.form[b]};
  }
  // Cap truncation in sight: only count arguments are robust.
  std::size_t na = A.children[a].size();
  std::size_t nb = B.children[b].size();
  bool exact_a = !A.own_cap[a];
  bool exact_b = !B.own_cap[b];
  if (exact_a && exact_b && na != nb) {
    return {CmpOutcome::RobustDiff, path,
            "child counts " + std::to_string(na) + " vs " + std::to_string(nb), A.form[a],
            B.form[b]};
  }
  if (!exact_a && exact_b && na > nb) {
    return {CmpOutcome::RobustDiff, path,
            "at least " + std::to_string(na) + " children vs exactly " + std::to_string(nb),
            A.form[a], B.form[b]};
  }
  if (exact_a && !exact_b && nb > na) {
    return {CmpOutcome::RobustDiff, path,
            "exactly " + std::to_string(na) + " children vs at least " + std::to_string(nb),
            A.form[a], B.form[b]};
  }
  return {CmpOutcome::Unknown, path, "cap truncation in the compared region", A.form[a],
          B.form[b]};
}

std::string preview_values(const std::vector<Nat>& values, std::size_t limit = 20) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size() && i < limit; ++i) {
    if (i) os << ", ";
    os << values[i].str();
  }
  if (values.size() > limit) os << ", ... (" << values.size() << " total)";
  return os.str();
}

}  // namespace

CriterionReport check_c1_isomorphic(const SystemDef& a, const SystemDef& b, std::uint32_t depth,
                                    const ReverseCaps& caps) {
  for (const SystemDef* sys : {&a, &b}) {
    if (!sys->fixed_point) {
      throw std::invalid_argument("criterion 1 needs a declared fixed point in " + sys->name);
    }
    if (!sys->has_reverse()) {
      throw std::invalid_argument("criterion 1 needs reverse families in " + sys->name);
    }
  }
  CriterionReport rep;
  rep.criterion = 1;
  rep.scope.depth = depth;
  rep.scope.caps = caps;

  ReverseTree ta = build_reverse_tree(a, *a.fixed_point, depth, caps);
  ReverseTree tb = build_reverse_tree(b, *b.fixed_point, depth, caps);
  TreeFacts fa = make_facts(ta);
  TreeFacts fb = make_facts(tb);

  rep.canonical_forms["a_root"] = fa.form[0];
  rep.canonical_forms["b_root"] = fb.form[0];
  rep.counts["a_nodes"] = ta.nodes.size();
  rep.counts["b_nodes"] = tb.nodes.size();
  rep.counts["a_root_eta"] = fa.children[0].size();
  rep.counts["b_root_eta"] = fb.children[0].size();

  CmpResult cmp = compare_nodes(fa, fb, 0, 0, "");
  switch (cmp.outcome) {
    case CmpOutcome::Equal:
      rep.verdict = Verdict::Pass;
      rep.reason = "reverse trees to depth " + std::to_string(depth) + " are isomorphic";
      break;
    case CmpOutcome::RobustDiff:
      rep.verdict = Verdict::Fail;
      rep.reason = "structures differ at subtree " + (cmp.path.empty() ? "<root>" : cmp.path) +
                   ": " + cmp.detail;
      rep.canonical_forms["a_at_diff"] = cmp.form_a;
      rep.canonical_forms["b_at_diff"] = cmp.form_b;
      rep.notes.push_back("first differing subtree path: " +
                          (cmp.path.empty() ? "<root>" : cmp.path));
      break;
    case CmpOutcome::Unknown:
      rep.verdict = Verdict::Inconclusive;
      rep.reason = cmp.detail;
      if (fa.children[0].size() == fb.children[0].size()) {
        rep.notes.push_back("bounded eta-profiles match at the roots (" +
                            std::to_string(fa.children[0].size()) + " each) under identical caps");
      }
      break;
  }
  return rep;
}

CriterionReport check_c2_coverage(const SystemDef& sys, Nat bound, std::uint32_t depth,
                                  const ReverseCaps& caps, const Limits& limits) {
  if (!sys.fixed_point) throw std::invalid_argument("criterion 2 needs a declared fixed point");
  if (!sys.has_reverse()) throw std::invalid_argument("criterion 2 needs reverse families");
  CriterionReport rep;
  rep.criterion = 2;
  rep.scope.window = {Nat::of(0), bound};
  rep.scope.depth = depth;
  rep.scope.caps = caps;

  CoverageResult cov = coverage_check(sys, *sys.fixed_point, bound, depth, caps);
  rep.counts["covered"] = cov.covered.size();
  rep.counts["uncovered"] = cov.uncovered.size();
  rep.counts["tree_nodes"] = cov.tree.nodes.size();

  if (cov.uncovered.empty()) {
    // Every admitted value <= bound sits in the tree, so no cap could have
    // excluded anything in the inspected region.
    rep.verdict = Verdict::Pass;
    rep.reason = "all admitted values <= " + bound.str() + " are identified by the reverse tree";
    return rep;
  }

  rep.witness_values = cov.uncovered;
  // Cross-check each uncovered value forward: beyond-depth distances mean
  // the shortfall is the depth bound; anything else is an enumeration gap.
  std::vector<Nat> anomalies;
  std::size_t traced = 0;
  for (Nat u : cov.uncovered) {
    TrajectoryRecord rec = trace(sys, u, limits);
    bool reaches = rec.root.kind == RootKind::FixedPoint && rec.root.value == *sys.fixed_point;
    if (reaches && rec.steps_to_root > depth) {
      if (traced < 10) {
        rep.notes.push_back(u.str() + " reaches " + sys.fixed_point->str() + " in " +
                            std::to_string(rec.steps_to_root) + " steps (> depth " +
                            std::to_string(depth) + ")");
      }
    } else {
      anomalies.push_back(u);
    }
    ++traced;
  }
  if (anomalies.empty()) {
    rep.verdict = Verdict::Fail;
    rep.reason = "uncovered at depth " + std::to_string(depth) + ": " +
                 preview_values(cov.uncovered) + " (all reach the fixed point, beyond the depth)";
  } else if (cov.tree.cap_truncated) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "uncovered values not explained by the depth bound under cap truncation: " +
                 preview_values(anomalies);
    rep.witness_values = anomalies;
  } else {
    rep.verdict = Verdict::Fail;
    rep.reason = "reverse families miss predecessors: " + preview_values(anomalies);
    rep.witness_values = anomalies;
  }
  return rep;
}

CriterionReport check_c3_self_similar(const SystemDef& sys, std::uint32_t depth,
                                      const std::vector<Nat>& samples, const ReverseCaps& caps) {
  if (!sys.fixed_point) throw std::invalid_argument("criterion 3 needs a declared fixed point");
  if (!sys.has_reverse()) throw std::invalid_argument("criterion 3 needs reverse families");
  CriterionReport rep;
  rep.criterion = 3;
  rep.scope.depth = depth;
  rep.scope.caps = caps;
  rep.counts["samples"] = samples.size();

  ReverseTree ref = build_reverse_tree(sys, *sys.fixed_point, depth, caps);
  TreeFacts fref = make_facts(ref);
  rep.canonical_forms["fixed_point_tree"] = fref.form[0];

  bool any_unknown = false;
  for (Nat s : samples) {
    ReverseTree ts = build_reverse_tree(sys, s, depth, caps);
    TreeFacts fs = make_facts(ts);
    CmpResult cmp = compare_nodes(fref, fs, 0, 0, "");
    if (cmp.outcome == CmpOutcome::RobustDiff) {
      rep.verdict = Verdict::Fail;
      rep.reason = "branch at " + s.str() + " differs from the fixed-point tree at " +
                   (cmp.path.empty() ? "<root>" : cmp.path) + ": " + cmp.detail;
      rep.witness_values.push_back(s);
      rep.canonical_forms["branch_" + s.str()] = fs.form[0];
      return rep;
    }
    if (cmp.outcome == CmpOutcome::Unknown) any_unknown = true;
  }
  if (any_unknown) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "cap truncation in the compared region";
  } else {
    rep.verdict = Verdict::Pass;
    rep.reason = "all " + std::to_string(samples.size()) + " sampled branches match to depth " +
                 std::to_string(depth);
  }
  return rep;
}

CriterionReport check_c4_eta(const SystemDef& sys, const std::vector<Nat>& nodes,
                             const ReverseCaps& caps) {
  if (!sys.has_reverse()) throw std::invalid_argument("criterion 4 needs reverse families");
  CriterionReport rep;
  rep.criterion = 4;
  rep.scope.caps = caps;
  rep.counts["nodes"] = nodes.size();
  if (nodes.empty()) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "no nodes to compare";
    return rep;
  }

  EtaProfile profile = eta_profile(sys, nodes, caps);
  bool any_unbounded = false, all_unbounded = true, any_truncated = false;
  for (const EtaEntry& e : profile.entries) {
    any_unbounded = any_unbounded || e.unbounded_family;
    all_unbounded = all_unbounded && e.unbounded_family;
    any_truncated = any_truncated || e.cap_truncated;
  }

  const EtaEntry& first = profile.entries.front();
  for (const EtaEntry& e : profile.entries) {
    if (e.count != first.count && !e.unbounded_family && !first.unbounded_family &&
        !e.cap_truncated && !first.cap_truncated) {
      rep.verdict = Verdict::Fail;
      rep.reason = "eta differs: " + first.node.str() + " has " + std::to_string(first.count) +
                   " direct predecessors, " + e.node.str() + " has " + std::to_string(e.count);
      rep.witness_pairs.push_back({first.node, Nat::of(first.count)});
      rep.witness_pairs.push_back({e.node, Nat::of(e.count)});
      return rep;
    }
  }

  if (!any_unbounded && !any_truncated) {
    rep.counts["eta"] = first.count;
    rep.verdict = Verdict::Pass;
    rep.reason = "every node has exactly eta = " + std::to_string(first.count) +
                 " direct predecessors";
    return rep;
  }
  if (all_unbounded) {
    // Pairwise-equal counts under identical caps earn the capped verdict.
    for (const EtaEntry& e : profile.entries) {
      if (e.count != first.count) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "unbounded families with differing capped counts (" + first.node.str() +
                     ": " + std::to_string(first.count) + ", " + e.node.str() + ": " +
                     std::to_string(e.count) + ")";
        return rep;
      }
    }
    rep.counts["eta_under_caps"] = first.count;
    rep.verdict = Verdict::PassUnderCaps;
    rep.reason = "eta = infinity by family shape; counts under identical caps all equal " +
                 std::to_string(first.count);
    return rep;
  }
  rep.verdict = Verdict::Inconclusive;
  rep.reason = any_unbounded ? "mixed finite and parametric predecessor families"
                             : "cap truncation on finite predecessor lists";
  return rep;
}

CriterionReport check_c5_branch_peel(FuncGraph g) {
  CriterionReport rep;
  rep.criterion = 5;
  rep.counts["nodes_before"] = g.node_count();

  bool boundary_present = false;
  for (NodeId id : g.node_ids()) {
    if (g.succ(id).kind == Succ::Kind::Boundary) boundary_present = true;
  }

  // Peel every valid delegate; one pass over a snapshot suffices since
  // removals never make an invalid delegate valid.
  while (true) {
    FuncGraph::RootsInfo ri = g.roots();
    std::vector<NodeId> delegates;
    for (NodeId id : g.node_ids()) {
      const Succ& s = g.succ(id);
      if (s.kind != Succ::Kind::Node || s.to == id) continue;
      if (ri.cycle_member[id]) continue;
      delegates.push_back(id);
    }
    if (delegates.empty()) break;
    for (NodeId id : delegates) {
      if (g.alive(id)) g.block4_remove_branch(id);
    }
  }

  std::vector<NodeId> residue = g.node_ids();
  rep.counts["residue"] = residue.size();
  std::vector<std::string> residue_desc;
  std::size_t fixed_count = 0, cycle_count = 0, boundary_count = 0;
  FuncGraph::RootsInfo ri = g.roots();
  for (const FuncGraph::Root& r : ri.roots) {
    if (r.kind == FuncGraph::Root::Kind::Cycle) ++cycle_count;
  }
  for (NodeId id : residue) {
    const Succ& s = g.succ(id);
    std::string who = g.labeled() ? g.label(id).str() : std::to_string(id);
    if (s.kind == Succ::Kind::None || (s.kind == Succ::Kind::Node && s.to == id)) {
      ++fixed_count;
      residue_desc.push_back("fixed " + who);
    } else if (s.kind == Succ::Kind::Boundary) {
      ++boundary_count;
      residue_desc.push_back("boundary " + who + " -> " + s.boundary_value.str());
    } else {
      residue_desc.push_back("cycle-member " + who);
    }
    if (g.labeled()) rep.witness_values.push_back(g.label(id));
  }
  for (std::size_t i = 0; i < residue_desc.size() && i < 20; ++i) rep.notes.push_back(residue_desc[i]);

  if (boundary_present) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "window exits present: " + std::to_string(boundary_count) +
                 " knot(s) leave the window, peeling verdict limited to the window";
    return rep;
  }
  if (fixed_count == 1 && residue.size() == 1 && cycle_count == 0) {
    rep.verdict = Verdict::Pass;
    rep.reason = "all branches peeled; residue is exactly the fixed knot";
    return rep;
  }
  rep.verdict = Verdict::Fail;
  rep.reason = "irreducible residue: " + std::to_string(fixed_count) + " fixed, " +
               std::to_string(cycle_count) + " cycle(s), " + std::to_string(residue.size()) +
               " knot(s) total";
  return rep;
}

CriterionReport check_c6_descent(const SystemDef& sys, Nat lo, Nat hi) {
  CriterionReport rep;
  rep.criterion = 6;
  rep.scope.window = {lo, hi};

  if (!sys.fixed_point) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "system declares no fixed point";
    return rep;
  }
  // The criterion speaks about the minimal admitted value.
  std::optional<Nat> minimal;
  for (u128 v = 0; v <= hi.v; ++v) {
    if (admits(sys, Nat{v})) {
      minimal = Nat{v};
      break;
    }
  }
  if (!minimal || *minimal != *sys.fixed_point) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "declared fixed point " + sys.fixed_point->str() +
                 " is not the minimal admitted value" +
                 (minimal ? " (minimal is " + minimal->str() + ")" : "");
    return rep;
  }

  DescentReport d = descent_check(sys, lo, hi);
  if (!d.no_rule.empty()) {
    rep.notes.push_back("no rule applies at: " + preview_values(d.no_rule));
    rep.counts["no_rule"] = d.no_rule.size();
  }
  if (!d.left_domain.empty()) {
    rep.notes.push_back("successor leaves the domain at: " + preview_values(d.left_domain));
    rep.counts["left_domain"] = d.left_domain.size();
  }
  if (!d.limit_hit.empty()) {
    rep.notes.push_back("evaluation limit at: " + preview_values(d.limit_hit));
    rep.counts["limit"] = d.limit_hit.size();
  }
  if (d.pass) {
    rep.verdict = Verdict::Pass;
    rep.reason = "every admitted knot above " + sys.fixed_point->str() +
                 " in the range has a smaller successor" +
                 (d.no_rule.empty() ? "" : " (where a rule applies)");
  } else {
    rep.verdict = Verdict::Fail;
    rep.witness_pairs.push_back(*d.witness);
    rep.reason = "witness: f(" + d.witness->first.str() + ") = " + d.witness->second.str() +
                 " >= " + d.witness->first.str();
  }
  return rep;
}

}  // namespace dynsys
