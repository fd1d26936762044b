#include "dynsys/cli_run.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "dynsys/criteria.hpp"
#include "dynsys/export.hpp"
#include "dynsys/parser.hpp"

namespace dynsys {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

struct RangeOpt {
  Nat lo, hi;
};

RangeOpt parse_range(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("range", "expected lo:hi");
  auto lo = Nat::parse(text.substr(0, colon));
  auto hi = Nat::parse(text.substr(colon + 1));
  if (!lo || !hi || *lo > *hi) throw CLI::ValidationError("range", "expected lo:hi with lo <= hi");
  return {*lo, *hi};
}

Nat parse_nat_opt(const std::string& text, const char* what) {
  auto v = Nat::parse(text);
  if (!v) throw CLI::ValidationError(what, "expected a natural number");
  return *v;
}

std::vector<Nat> parse_nat_list(const std::string& text, const char* what) {
  std::vector<Nat> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_nat_opt(item, what));
  }
  if (out.empty()) throw CLI::ValidationError(what, "expected a comma-separated list");
  return out;
}

struct OutputSink {
  std::ostream& fallback;
  std::string path;

  // Writes atomically enough for our purposes; deterministic bytes.
  void write(const std::string& content) const {
    if (path.empty()) {
      fallback << content;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
  }
};

std::string verdict_line(const std::string& system, const CriterionReport& rep) {
  std::ostringstream os;
  os << "criterion " << rep.criterion << " [" << system << "]: ";
  std::string v = verdict_name(rep.verdict);
  for (char& c : v) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  os << v << " - " << rep.reason << "\n";
  for (const std::string& note : rep.notes) os << "  note: " << note << "\n";
  return os.str();
}

int verdict_exit(const CriterionReport& rep, bool strict) {
  switch (rep.verdict) {
    case Verdict::Pass:
    case Verdict::PassUnderCaps:
      return kExitOk;
    case Verdict::Fail:
      return kExitFail;
    case Verdict::Inconclusive:
      return strict ? kExitInconclusive : kExitOk;
  }
  return kExitOk;
}

std::string trace_text(const TrajectoryRecord& rec) {
  std::ostringstream os;
  os << "seed " << rec.seed.str() << ": " << rec.root.str() << " after " << rec.steps_to_root
     << " step(s)";
  if (rec.total_stop) os << ", total stop " << *rec.total_stop;
  os << ", max excursion " << rec.max_excursion.str() << "\n";
  if (rec.values.size() <= 120) {
    os << "values:";
    for (Nat v : rec.values) os << " " << v.str();
    os << "\n";
  } else {
    os << "values: " << rec.values.size() << " recorded (use --format json)\n";
  }
  return os.str();
}

std::string sweep_text(const SweepReport& rep) {
  std::ostringstream os;
  os << "range " << rep.lo.str() << ":" << rep.hi.str() << ", " << rep.admitted_count
     << " admitted seed(s)\n";
  for (const SweepRootTally& t : rep.tallies) {
    os << "  " << t.root.str() << ": " << t.count << "\n";
  }
  os << "non-converged: " << rep.non_converged.size() << "\n";
  if (!rep.records.empty()) {
    os << "record breakers (seed, total stop, max excursion):\n";
    for (const SweepRecordEntry& r : rep.records) {
      os << "  " << r.seed.str() << "  ";
      if (r.total_stop) {
        os << *r.total_stop;
      } else {
        os << "-";
      }
      os << "  " << r.max_excursion.str() << "\n";
    }
  }
  os << "elapsed: " << rep.elapsed.count() << " s\n";
  return os.str();
}

std::string reverse_text(const ReverseTree& tree) {
  std::ostringstream os;
  os << "reverse tree at " << tree.root.str() << ", depth " << tree.depth << ", "
     << tree.nodes.size() << " node(s)";
  if (tree.cap_truncated) os << " [cap-truncated]";
  os << "\n";
  auto kids = tree.children();
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    std::uint32_t i = stack.back();
    stack.pop_back();
    const ReverseTreeNode& n = tree.nodes[i];
    os << "  " << std::string(n.depth * 2, ' ') << n.value.str();
    if (n.frontier == Frontier::TruncatedByCap) os << " [cap]";
    os << "\n";
    for (auto it = kids[i].rbegin(); it != kids[i].rend(); ++it) stack.push_back(*it);
  }
  return os.str();
}

NodeId node_by_label(const FuncGraph& g, Nat label) {
  auto id = g.find_label(label);
  if (!id) throw std::runtime_error("no knot labeled " + label.str());
  return *id;
}

// One reduction instruction: "<op> [args]". Node arguments are labels.
void apply_reduce_op(FuncGraph& g, const SystemDef* sys, const std::string& op,
                     const std::string& args) {
  auto labels_to_ids = [&](const std::string& text) {
    std::vector<NodeId> ids;
    for (Nat v : parse_nat_list(text, "nodes")) ids.push_back(node_by_label(g, v));
    return ids;
  };
  if (op == "block1") {
    g.block1_contract_chain(labels_to_ids(args));
  } else if (op == "block1-absorb") {
    g.block1_absorb_chain(labels_to_ids(args));
  } else if (op == "block2") {
    g.block2_cycle_to_fixed(labels_to_ids(args));
  } else if (op == "block3") {
    g.block3_prune_no_input(node_by_label(g, parse_nat_opt(args, "node")));
  } else if (op == "block4") {
    g.block4_remove_branch(node_by_label(g, parse_nat_opt(args, "delegate")));
  } else if (op == "block5") {
    std::vector<std::pair<Nat, Nat>> mapping;
    std::stringstream ss(args);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      auto colon = pair.find(':');
      if (colon == std::string::npos) throw std::runtime_error("block5 expects old:new pairs");
      mapping.emplace_back(parse_nat_opt(pair.substr(0, colon), "label"),
                           parse_nat_opt(pair.substr(colon + 1), "label"));
    }
    g.block5_permute_labels(std::move(mapping));
  } else if (op == "contract-even-chains") {
    contract_even_chains(g);
  } else if (op == "prune-loop") {
    prune_no_input_loop(g, sys);
  } else {
    throw std::runtime_error("unknown reduction op '" + op + "'");
  }
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dynamic integer systems: trajectories, reverse trees, reductions, criteria"};
  app.require_subcommand(1);

  std::string system_name, system_b_name, format = "text", out_path;
  std::string range_text, window_text, nodes_text, script_path, op_text, op_args;
  std::uint64_t seed_u64 = 0, depth = 8, param_cap = 24, jobs = 1, max_steps = 1'000'000;
  std::string max_value_text, value_cap_text, bound_text;
  int criterion = 0;
  bool strict = false, collapse_cycles = false;
  std::uint64_t rng_seed = 1;
  if (const char* env = std::getenv("DYNSYS_SEED")) {
    rng_seed = std::strtoull(env, nullptr, 10);
  }

  auto add_system = [&](CLI::App* cmd) {
    cmd->add_option("--system", system_name, "built-in name or .dsys path")->required();
  };
  auto add_format = [&](CLI::App* cmd, const std::string& choices) {
    cmd->add_option("--format", format, "output format (" + choices + ")");
    cmd->add_option("--out", out_path, "write output to a file");
  };
  auto add_limits = [&](CLI::App* cmd) {
    cmd->add_option("--max-steps", max_steps, "step bound per trajectory");
    cmd->add_option("--max-value", max_value_text, "value bound per trajectory");
  };
  auto add_caps = [&](CLI::App* cmd) {
    cmd->add_option("--param-cap", param_cap, "largest family parameter tried");
    cmd->add_option("--value-cap", value_cap_text, "largest predecessor value kept");
  };

  CLI::App* trace_cmd = app.add_subcommand("trace", "iterate a seed to its root");
  add_system(trace_cmd);
  trace_cmd->add_option("--seed", seed_u64, "starting value")->required();
  add_limits(trace_cmd);
  add_format(trace_cmd, "text|json");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "classify every admitted seed in a range");
  add_system(sweep_cmd);
  sweep_cmd->add_option("--range", range_text, "inclusive lo:hi")->required();
  sweep_cmd->add_option("--jobs", jobs, "worker threads");
  add_limits(sweep_cmd);
  add_format(sweep_cmd, "text|json|csv");

  CLI::App* reverse_cmd = app.add_subcommand("reverse", "predecessors and reverse trees");
  add_system(reverse_cmd);
  reverse_cmd->add_option("--root", bound_text, "tree root value")->required();
  reverse_cmd->add_option("--depth", depth, "tree depth");
  add_caps(reverse_cmd);
  add_format(reverse_cmd, "text|json|dot");

  CLI::App* reduce_cmd = app.add_subcommand("reduce", "apply reduction blocks to a window graph");
  add_system(reduce_cmd);
  reduce_cmd->add_option("--window", window_text, "inclusive lo:hi")->required();
  reduce_cmd->add_option("--op", op_text,
                         "block1|block1-absorb|block2|block3|block4|block5|"
                         "contract-even-chains|prune-loop");
  reduce_cmd->add_option("--args", op_args, "op arguments (labels: a,b,c or old:new,...)");
  reduce_cmd->add_option("--script", script_path, "file with one op per line: <op> [args]");
  add_format(reduce_cmd, "text|json|dot");

  CLI::App* check_cmd = app.add_subcommand("check", "run a convergence criterion");
  add_system(check_cmd);
  check_cmd->add_option("--criterion", criterion, "1..6")->required();
  check_cmd->add_option("--system-b", system_b_name, "reference system (criterion 1)");
  check_cmd->add_option("--range", range_text, "inclusive lo:hi (criteria 2, 6)");
  check_cmd->add_option("--window", window_text, "inclusive lo:hi (criterion 5)");
  check_cmd->add_option("--depth", depth, "tree depth (criteria 1, 2, 3)");
  check_cmd->add_option("--samples", nodes_text, "comma-separated sample nodes (criteria 3, 4)");
  check_cmd->add_option("--rng-seed", rng_seed, "sampling seed (DYNSYS_SEED overrides default)");
  check_cmd->add_flag("--strict", strict, "exit 3 on inconclusive");
  check_cmd->add_flag("--collapse-cycles", collapse_cycles,
                      "collapse cycle roots (block 2) before criterion 5");
  add_caps(check_cmd);
  add_limits(check_cmd);
  add_format(check_cmd, "text|json");

  CLI::App* export_cmd = app.add_subcommand("export", "emit a graph or tree");
  add_system(export_cmd);
  export_cmd->add_option("--window", window_text, "graph window lo:hi");
  export_cmd->add_option("--root", bound_text, "tree root value");
  export_cmd->add_option("--depth", depth, "tree depth");
  add_caps(export_cmd);
  add_format(export_cmd, "dot|json");

  CLI::App* show_cmd = app.add_subcommand("show", "print a system definition");
  add_system(show_cmd);
  add_format(show_cmd, "text|dsys|json");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    LoadResult loaded = load_system(system_name);
    if (!loaded.system) {
      err << "error: " << loaded.error << "\n";
      return kExitUsage;
    }
    const SystemDef& sys = *loaded.system;
    OutputSink sink{out, out_path};

    Limits limits;
    limits.max_steps = max_steps;
    if (!max_value_text.empty()) limits.max_value = parse_nat_opt(max_value_text, "max-value");
    ReverseCaps caps;
    caps.param_cap = param_cap;
    if (!value_cap_text.empty()) caps.value_cap = parse_nat_opt(value_cap_text, "value-cap");

    if (app.got_subcommand(trace_cmd)) {
      TrajectoryRecord rec = trace(sys, Nat::of(seed_u64), limits);
      if (format == "json") {
        sink.write(trajectory_json(rec).dump(2) + "\n");
      } else {
        sink.write(trace_text(rec));
      }
      return kExitOk;
    }

    if (app.got_subcommand(sweep_cmd)) {
      RangeOpt range = parse_range(range_text);
      SweepOptions opts;
      opts.limits = limits;
      opts.jobs = static_cast<int>(jobs);
      if (format == "csv") {
        // Stream rows; large ranges must not buffer per-seed outcomes.
        std::ofstream file;
        std::ostream* os = &out;
        if (!out_path.empty()) {
          file.open(out_path, std::ios::binary);
          if (!file) throw std::runtime_error("cannot write " + out_path);
          os = &file;
        }
        write_sweep_csv_header(*os);
        opts.on_seed = [os](Nat seed, const SeedOutcome& o) { write_sweep_csv_row(*os, seed, o); };
        sweep(sys, range.lo, range.hi, opts);
        return kExitOk;
      }
      SweepReport rep = sweep(sys, range.lo, range.hi, opts);
      if (format == "json") {
        sink.write(sweep_json(rep).dump(2) + "\n");
      } else {
        sink.write(sweep_text(rep));
      }
      return kExitOk;
    }

    if (app.got_subcommand(reverse_cmd)) {
      Nat root = parse_nat_opt(bound_text, "root");
      ReverseTree tree = build_reverse_tree(sys, root, static_cast<std::uint32_t>(depth), caps);
      if (format == "json") {
        sink.write(tree_json(tree).dump(2) + "\n");
      } else if (format == "dot") {
        sink.write(dot_tree(tree));
      } else {
        sink.write(reverse_text(tree));
      }
      return kExitOk;
    }

    if (app.got_subcommand(reduce_cmd)) {
      RangeOpt window = parse_range(window_text);
      FuncGraph g = FuncGraph::from_system(sys, window.lo, window.hi);
      if (!script_path.empty()) {
        std::ifstream script(script_path);
        if (!script) throw std::runtime_error("cannot open " + script_path);
        std::string line;
        while (std::getline(script, line)) {
          std::istringstream ls(line);
          std::string op, rest;
          ls >> op;
          std::getline(ls, rest);
          rest.erase(0, rest.find_first_not_of(" \t"));
          if (op.empty() || op[0] == '#') continue;
          apply_reduce_op(g, &sys, op, rest);
        }
      } else if (!op_text.empty()) {
        apply_reduce_op(g, &sys, op_text, op_args);
      }
      if (format == "json") {
        sink.write(graph_json(g).dump(2) + "\n");
      } else if (format == "dot") {
        sink.write(dot_graph(g));
      } else {
        std::ostringstream os;
        os << g.node_count() << " knot(s) after " << g.log().size() << " reduction step(s)\n";
        sink.write(os.str());
      }
      return kExitOk;
    }

    if (app.got_subcommand(check_cmd)) {
      CriterionReport rep;
      switch (criterion) {
        case 1: {
          if (system_b_name.empty()) throw std::runtime_error("criterion 1 needs --system-b");
          LoadResult other = load_system(system_b_name);
          if (!other.system) throw std::runtime_error(other.error);
          rep = check_c1_isomorphic(sys, *other.system, static_cast<std::uint32_t>(depth), caps);
          break;
        }
        case 2: {
          RangeOpt range = parse_range(range_text.empty() ? "0:1000" : range_text);
          rep = check_c2_coverage(sys, range.hi, static_cast<std::uint32_t>(depth), caps, limits);
          break;
        }
        case 3:
        case 4: {
          std::vector<Nat> samples = nodes_text.empty()
                                         ? default_sample_nodes(sys, rng_seed)
                                         : parse_nat_list(nodes_text, "samples");
          rep = criterion == 3
                    ? check_c3_self_similar(sys, static_cast<std::uint32_t>(depth), samples, caps)
                    : check_c4_eta(sys, samples, caps);
          rep.scope.sample_seed = rng_seed;
          break;
        }
        case 5: {
          RangeOpt window = parse_range(window_text.empty() ? "1:100" : window_text);
          FuncGraph g = FuncGraph::from_system(sys, window.lo, window.hi);
          if (collapse_cycles) {
            FuncGraph::RootsInfo ri = g.roots();
            for (const FuncGraph::Root& root : ri.roots) {
              if (root.kind == FuncGraph::Root::Kind::Cycle) {
                g.block2_cycle_to_fixed(root.cycle_nodes);
              }
            }
          }
          rep = check_c5_branch_peel(std::move(g));
          rep.scope.window = {window.lo, window.hi};
          break;
        }
        case 6: {
          RangeOpt range = parse_range(range_text.empty() ? "1:10000" : range_text);
          rep = check_c6_descent(sys, range.lo, range.hi);
          break;
        }
        default:
          throw std::runtime_error("criterion must be 1..6");
      }
      if (format == "json") {
        sink.write(report_json(rep).dump(2) + "\n");
      } else {
        sink.write(verdict_line(sys.name, rep));
      }
      return verdict_exit(rep, strict);
    }

    if (app.got_subcommand(export_cmd)) {
      if (!window_text.empty()) {
        RangeOpt window = parse_range(window_text);
        FuncGraph g = FuncGraph::from_system(sys, window.lo, window.hi);
        sink.write(format == "json" ? graph_json(g).dump(2) + "\n" : dot_graph(g));
      } else if (!bound_text.empty()) {
        Nat root = parse_nat_opt(bound_text, "root");
        ReverseTree tree = build_reverse_tree(sys, root, static_cast<std::uint32_t>(depth), caps);
        sink.write(format == "json" ? tree_json(tree).dump(2) + "\n" : dot_tree(tree));
      } else {
        throw std::runtime_error("export needs --window (graph) or --root (tree)");
      }
      return kExitOk;
    }

    if (app.got_subcommand(show_cmd)) {
      if (format == "json") {
        sink.write(system_json(sys).dump(2) + "\n");
      } else {
        sink.write(emit_dsys(sys));
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dynsys
