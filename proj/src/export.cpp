#include "dynsys/export.hpp"

#include <algorithm>
#include <sstream>

#include "dynsys/parser.hpp"

namespace dynsys {

using nlohmann::json;

json nat_json(Nat n) {
  if (n.fits_u64()) return json(n.low_u64());
  return json(n.str());
}

namespace {

json root_json(const RootClass& root) {
  json j;
  j["kind"] = root_kind_name(root.kind);
  switch (root.kind) {
    case RootKind::FixedPoint:
    case RootKind::LeftDomain:
    case RootKind::NoApplicableRule:
    case RootKind::ExceededValueBound:
      j["value"] = nat_json(root.value);
      break;
    case RootKind::Cycle: {
      json members = json::array();
      for (Nat m : root.cycle) members.push_back(nat_json(m));
      j["members"] = std::move(members);
      break;
    }
    case RootKind::ExceededStepBound:
      break;
  }
  return j;
}

std::string root_value_csv(const RootClass& root) {
  switch (root.kind) {
    case RootKind::FixedPoint:
    case RootKind::LeftDomain:
    case RootKind::NoApplicableRule:
    case RootKind::ExceededValueBound:
      return root.value.str();
    case RootKind::Cycle:
      return root.cycle.front().str();  // minimal member
    case RootKind::ExceededStepBound:
      return "";
  }
  return "";
}

}  // namespace

json system_json(const SystemDef& sys) {
  json j;
  j["name"] = sys.name;
  j["admit"] = ast_to_string(sys.admit.clauses);
  if (sys.fixed_point) j["fixed_point"] = nat_json(*sys.fixed_point);
  json rules = json::array();
  for (const ForwardRule& r : sys.forward) {
    rules.push_back({{"if", ast_to_string(r.guard)}, {"then", ast_to_string(r.expr)}});
  }
  j["forward"] = std::move(rules);
  json reverse = json::array();
  for (const ReverseFamily& f : sys.reverse) {
    json fam;
    switch (f.kind) {
      case ReverseFamily::Kind::FiniteList: {
        fam["kind"] = "list";
        json exprs = json::array();
        for (const Ast& e : f.list_exprs) exprs.push_back(ast_to_string(e));
        fam["exprs"] = std::move(exprs);
        break;
      }
      case ReverseFamily::Kind::Exponent:
        fam["kind"] = "family";
        fam["param"] = f.param;
        fam["lower"] = nat_json(f.param_lower);
        fam["expr"] = ast_to_string(f.expr);
        break;
      case ReverseFamily::Kind::Prime:
        fam["kind"] = "primes";
        fam["param"] = f.param;
        fam["greater_than"] = nat_json(f.param_lower);
        fam["expr"] = ast_to_string(f.expr);
        break;
    }
    reverse.push_back(std::move(fam));
  }
  j["reverse"] = std::move(reverse);
  return j;
}

json trajectory_json(const TrajectoryRecord& rec) {
  json j;
  j["seed"] = nat_json(rec.seed);
  json values = json::array();
  for (Nat v : rec.values) values.push_back(nat_json(v));
  j["values"] = std::move(values);
  j["root"] = root_json(rec.root);
  j["steps_to_root"] = rec.steps_to_root;
  if (rec.total_stop) {
    j["total_stop"] = *rec.total_stop;
  } else {
    j["total_stop"] = nullptr;
  }
  j["max_excursion"] = nat_json(rec.max_excursion);
  return j;
}

json tree_json(const ReverseTree& tree) {
  json j;
  j["root"] = nat_json(tree.root);
  j["depth"] = tree.depth;
  json nodes = json::array();
  for (const ReverseTreeNode& n : tree.nodes) {
    json e;
    e["value"] = nat_json(n.value);
    if (n.parent >= 0) {
      e["parent"] = nat_json(tree.nodes[static_cast<std::size_t>(n.parent)].value);
    } else {
      e["parent"] = nullptr;
    }
    e["depth"] = n.depth;
    e["frontier"] = frontier_name(n.frontier);
    nodes.push_back(std::move(e));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

namespace {

// Node print order: ascending label when labeled, ascending id otherwise.
std::vector<NodeId> ordered_ids(const FuncGraph& g) {
  std::vector<NodeId> ids = g.node_ids();
  if (g.labeled()) {
    std::sort(ids.begin(), ids.end(),
              [&](NodeId a, NodeId b) { return g.label(a) < g.label(b); });
  }
  return ids;
}

std::string node_name(const FuncGraph& g, NodeId id) {
  return g.labeled() ? g.label(id).str() : "#" + std::to_string(id);
}

}  // namespace

json graph_json(const FuncGraph& g) {
  json j;
  json nodes = json::array();
  for (NodeId id : ordered_ids(g)) {
    json e;
    e["id"] = id;
    if (g.labeled()) e["label"] = nat_json(g.label(id));
    const Succ& s = g.succ(id);
    switch (s.kind) {
      case Succ::Kind::Node:
        e["succ"] = g.labeled() ? nat_json(g.label(s.to)) : json(s.to);
        break;
      case Succ::Kind::Boundary:
        e["succ"] = nullptr;
        e["boundary"] = nat_json(s.boundary_value);
        break;
      case Succ::Kind::None:
        e["succ"] = nullptr;
        break;
    }
    nodes.push_back(std::move(e));
  }
  j["nodes"] = std::move(nodes);
  json log = json::array();
  for (const ReductionStep& step : g.log()) {
    json s;
    s["block"] = block_number(step.op);
    s["op"] = op_name(step.op);
    s["nodes"] = step.nodes;
    if (!step.label_map.empty()) {
      json lm = json::array();
      for (const auto& [from, to] : step.label_map) {
        lm.push_back({nat_json(from), nat_json(to)});
      }
      s["labels"] = std::move(lm);
    }
    s["removed"] = step.removed;
    log.push_back(std::move(s));
  }
  j["reduction_log"] = std::move(log);
  return j;
}

json sweep_json(const SweepReport& rep) {
  json j;
  j["lo"] = nat_json(rep.lo);
  j["hi"] = nat_json(rep.hi);
  j["admitted"] = rep.admitted_count;
  json tallies = json::array();
  for (const SweepRootTally& t : rep.tallies) {
    json e = root_json(t.root);
    e["count"] = t.count;
    tallies.push_back(std::move(e));
  }
  j["tallies"] = std::move(tallies);
  json nc = json::array();
  for (Nat s : rep.non_converged) nc.push_back(nat_json(s));
  j["non_converged"] = std::move(nc);
  json records = json::array();
  for (const SweepRecordEntry& r : rep.records) {
    json e;
    e["seed"] = nat_json(r.seed);
    if (r.total_stop) {
      e["total_stop"] = *r.total_stop;
    } else {
      e["total_stop"] = nullptr;
    }
    e["max_excursion"] = nat_json(r.max_excursion);
    records.push_back(std::move(e));
  }
  j["records"] = std::move(records);
  // No timing here: identical invocations must produce identical bytes.
  return j;
}

json report_json(const CriterionReport& rep) {
  json j;
  j["criterion"] = rep.criterion;
  j["verdict"] = verdict_name(rep.verdict);
  j["reason"] = rep.reason;
  json scope = json::object();
  if (rep.scope.window) {
    scope["range"] = {nat_json(rep.scope.window->first), nat_json(rep.scope.window->second)};
  }
  if (rep.scope.depth) scope["depth"] = *rep.scope.depth;
  scope["param_cap"] = rep.scope.caps.param_cap;
  if (rep.scope.caps.value_cap) scope["value_cap"] = nat_json(*rep.scope.caps.value_cap);
  j["scope"] = std::move(scope);
  json witnesses = json::array();
  for (const auto& [a, b] : rep.witness_pairs) {
    witnesses.push_back({nat_json(a), nat_json(b)});
  }
  for (Nat v : rep.witness_values) witnesses.push_back(nat_json(v));
  j["witnesses"] = std::move(witnesses);
  json forms = json::object();
  for (const auto& [k, v] : rep.canonical_forms) forms[k] = v;
  j["canonical_forms"] = std::move(forms);
  json counts = json::object();
  for (const auto& [k, v] : rep.counts) counts[k] = v;
  j["counts"] = std::move(counts);
  j["notes"] = rep.notes;
  return j;
}

std::string dot_graph(const FuncGraph& g) {
  std::ostringstream os;
  os << "digraph dynsys {\n  node [shape=circle];\n";
  std::vector<NodeId> ids = ordered_ids(g);
  for (NodeId id : ids) {
    os << "  \"" << node_name(g, id) << "\";\n";
  }
  std::size_t boundary_seq = 0;
  for (NodeId id : ids) {
    const Succ& s = g.succ(id);
    switch (s.kind) {
      case Succ::Kind::Node:
        os << "  \"" << node_name(g, id) << "\" -> \"" << node_name(g, s.to) << "\";\n";
        break;
      case Succ::Kind::Boundary: {
        std::string bname = "out" + std::to_string(boundary_seq++);
        os << "  \"" << bname << "\" [shape=diamond, label=\"" << s.boundary_value.str()
           << "\"];\n";
        os << "  \"" << node_name(g, id) << "\" -> \"" << bname << "\" [style=dashed];\n";
        break;
      }
      case Succ::Kind::None:
        break;
    }
  }
  os << "}\n";
  return os.str();
}

std::string dot_tree(const ReverseTree& tree) {
  std::ostringstream os;
  os << "digraph reverse_tree {\n  node [shape=circle];\n";
  for (const ReverseTreeNode& n : tree.nodes) {
    os << "  \"" << n.value.str() << "\"";
    if (n.frontier == Frontier::TruncatedByCap) os << " [style=dashed]";
    os << ";\n";
  }
  for (const ReverseTreeNode& n : tree.nodes) {
    if (n.parent < 0) continue;
    os << "  \"" << n.value.str() << "\" -> \""
       << tree.nodes[static_cast<std::size_t>(n.parent)].value.str() << "\";\n";
  }
  os << "}\n";
  return os.str();
}

void write_sweep_csv_header(std::ostream& os) {
  os << "seed,root_kind,root_value,steps,total_stop,max_excursion\n";
}

void write_sweep_csv_row(std::ostream& os, Nat seed, const SeedOutcome& out) {
  os << seed.str() << ',' << root_kind_name(out.root.kind) << ',' << root_value_csv(out.root)
     << ',' << out.steps_to_root << ',';
  if (out.total_stop) os << *out.total_stop;
  os << ',' << out.max_excursion.str() << '\n';
}

void write_sweep_csv(std::ostream& os, const SweepReport& rep) {
  write_sweep_csv_header(os);
  for (const auto& [seed, out] : rep.per_seed) write_sweep_csv_row(os, seed, out);
}

}  // namespace dynsys
