#pragma once

#include <ostream>
#include <string>

#include "dynsys/criteria.hpp"
#include "dynsys/funcgraph.hpp"
#include "dynsys/reverse.hpp"
#include "dynsys/trajectory.hpp"

#include "json.hpp"

namespace dynsys {

// Values are emitted as JSON numbers while they fit an unsigned 64-bit
// integer and as decimal strings beyond that.
nlohmann::json nat_json(Nat n);

nlohmann::json system_json(const SystemDef& sys);
nlohmann::json trajectory_json(const TrajectoryRecord& rec);
nlohmann::json tree_json(const ReverseTree& tree);
nlohmann::json graph_json(const FuncGraph& g);
nlohmann::json sweep_json(const SweepReport& rep);
nlohmann::json report_json(const CriterionReport& rep);

/// DOT digraph, deterministic node order (ascending label, then id);
/// Boundary successors render as dashed edges to diamond knots.
std::string dot_graph(const FuncGraph& g);
std::string dot_tree(const ReverseTree& tree);

/// CSV rows seed,root_kind,root_value,steps,total_stop,max_excursion.
void write_sweep_csv_header(std::ostream& os);
void write_sweep_csv_row(std::ostream& os, Nat seed, const SeedOutcome& out);
void write_sweep_csv(std::ostream& os, const SweepReport& rep);

}  // namespace dynsys
