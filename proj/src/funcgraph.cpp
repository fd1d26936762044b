#include "dynsys/funcgraph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "dynsys/canonical.hpp"
#include "dynsys/reverse.hpp"

namespace dynsys {

int block_number(ReductionStep::Op op) {
  switch (op) {
    case ReductionStep::Op::Block1Contract:
    case ReductionStep::Op::Block1Absorb: return 1;
    case ReductionStep::Op::Block2CycleToFixed: return 2;
    case ReductionStep::Op::Block3Prune: return 3;
    case ReductionStep::Op::Block4RemoveBranch: return 4;
    case ReductionStep::Op::Block5Permute: return 5;
  }
  return 0;
}

const char* op_name(ReductionStep::Op op) {
  switch (op) {
    case ReductionStep::Op::Block1Contract: return "block1_contract";
    case ReductionStep::Op::Block1Absorb: return "block1_absorb";
    case ReductionStep::Op::Block2CycleToFixed: return "block2_cycle_to_fixed";
    case ReductionStep::Op::Block3Prune: return "block3_prune";
    case ReductionStep::Op::Block4RemoveBranch: return "block4_remove_branch";
    case ReductionStep::Op::Block5Permute: return "block5_permute";
  }
  return "?";
}

FuncGraph FuncGraph::from_system(const SystemDef& sys, Nat lo, Nat hi) {
  if (lo > hi) throw std::invalid_argument("from_system: empty window (lo > hi)");
  FuncGraph g;
  std::unordered_map<u128, NodeId, NatHashRaw> by_value;
  for (u128 v = lo.v; v <= hi.v; ++v) {
    if (!admits(sys, Nat{v})) continue;
    by_value.emplace(v, g.add_node(Nat{v}));
  }
  for (auto& [value, id] : by_value) {
    StepResult step = eval_forward(sys, Nat{value});
    switch (step.kind) {
      case StepResult::Kind::SelfFixed:
        g.set_succ_node(id, id);  // the fixed point keeps its self-edge
        break;
      case StepResult::Kind::NoRule:
        g.set_succ_none(id);  // stuck value: sink
        break;
      case StepResult::Kind::Limit:
        // Successor not representable: an exit recorded at the knot itself.
        g.set_succ_boundary(id, Nat{value});
        break;
      case StepResult::Kind::Next: {
        auto it = step.leaves_domain ? by_value.end() : by_value.find(step.value.v);
        if (it == by_value.end()) {
          g.set_succ_boundary(id, step.value);
        } else {
          g.set_succ_node(id, it->second);
        }
        break;
      }
    }
  }
  return g;
}

NodeId FuncGraph::add_node() {
  if (labeled_ && alive_count_ > 0) {
    throw std::invalid_argument("add_node: labeled graph needs a label");
  }
  NodeId id = static_cast<NodeId>(succ_.size());
  exists_.push_back(true);
  succ_.push_back(Succ{});
  labels_.push_back(Nat{});
  in_deg_.push_back(0);
  ++alive_count_;
  return id;
}

NodeId FuncGraph::add_node(Nat label) {
  if (!labeled_ && alive_count_ > 0) {
    throw std::invalid_argument("add_node: unlabeled graph cannot take labels");
  }
  if (label_index_.count(label.v)) {
    throw std::invalid_argument("add_node: duplicate label " + label.str());
  }
  labeled_ = true;
  NodeId id = static_cast<NodeId>(succ_.size());
  exists_.push_back(true);
  succ_.push_back(Succ{});
  labels_.push_back(label);
  in_deg_.push_back(0);
  label_index_.emplace(label.v, id);
  ++alive_count_;
  return id;
}

void FuncGraph::require_alive(NodeId id, const char* who) const {
  if (!alive(id)) {
    throw std::invalid_argument(std::string(who) + ": node " + std::to_string(id) +
                                " is not in the graph");
  }
}

void FuncGraph::set_succ_internal(NodeId from, Succ s) {
  Succ& old = succ_[from];
  if (old.kind == Succ::Kind::Node) --in_deg_[old.to];
  if (s.kind == Succ::Kind::Node) ++in_deg_[s.to];
  old = s;
}

void FuncGraph::set_succ_node(NodeId from, NodeId to) {
  require_alive(from, "set_succ_node");
  require_alive(to, "set_succ_node");
  set_succ_internal(from, Succ{Succ::Kind::Node, to, Nat{}});
}

void FuncGraph::set_succ_none(NodeId from) {
  require_alive(from, "set_succ_none");
  set_succ_internal(from, Succ{Succ::Kind::None, kNoNode, Nat{}});
}

void FuncGraph::set_succ_boundary(NodeId from, Nat value) {
  require_alive(from, "set_succ_boundary");
  set_succ_internal(from, Succ{Succ::Kind::Boundary, kNoNode, value});
}

void FuncGraph::remove_node(NodeId id) {
  set_succ_internal(id, Succ{Succ::Kind::None, kNoNode, Nat{}});
  exists_[id] = false;
  if (labeled_) label_index_.erase(labels_[id].v);
  --alive_count_;
}

std::optional<NodeId> FuncGraph::find_label(Nat label) const {
  auto it = label_index_.find(label.v);
  if (it == label_index_.end() || !exists_[it->second]) return std::nullopt;
  return it->second;
}

std::vector<NodeId> FuncGraph::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(alive_count_);
  for (NodeId id = 0; id < exists_.size(); ++id) {
    if (exists_[id]) ids.push_back(id);
  }
  return ids;
}

std::vector<std::vector<NodeId>> FuncGraph::reverse_adjacency() const {
  std::vector<std::vector<NodeId>> radj(succ_.size());
  for (NodeId id = 0; id < succ_.size(); ++id) {
    if (!exists_[id]) continue;
    if (succ_[id].kind == Succ::Kind::Node) radj[succ_[id].to].push_back(id);
  }
  return radj;
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

namespace {

void require_distinct_alive_path(const FuncGraph& g, std::span<const NodeId> chain,
                                 const char* who) {
  if (chain.empty()) throw std::invalid_argument(std::string(who) + ": empty chain");
  std::unordered_set<NodeId> set;
  for (NodeId id : chain) {
    if (!g.alive(id)) {
      throw std::invalid_argument(std::string(who) + ": node " + std::to_string(id) +
                                  " is not in the graph");
    }
    if (!set.insert(id).second) {
      throw std::invalid_argument(std::string(who) + ": chain repeats a node");
    }
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const Succ& s = g.succ(chain[i]);
    if (s.kind != Succ::Kind::Node || s.to != chain[i + 1]) {
      throw std::invalid_argument(std::string(who) + ": nodes do not form a successor path");
    }
  }
}

}  // namespace

void FuncGraph::block1_contract_chain(std::span<const NodeId> chain) {
  require_distinct_alive_path(*this, chain, "block1");
  const Succ& tail = succ_[chain.back()];
  if (tail.kind != Succ::Kind::Node) {
    throw std::invalid_argument("block1: chain must point at a following knot");
  }
  NodeId w = tail.to;
  for (NodeId id : chain) {
    if (id == w) throw std::invalid_argument("block1: chain closes a cycle");
  }
  RootsInfo ri = roots();
  for (NodeId id : chain) {
    if (ri.cycle_member[id] || (succ_[id].kind == Succ::Kind::Node && succ_[id].to == id)) {
      throw std::invalid_argument("block1: node " + std::to_string(id) + " lies on a cycle");
    }
  }
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (in_deg_[chain[i]] != 1) {
      throw std::invalid_argument("block1: interior node " + std::to_string(chain[i]) +
                                  " has in-degree " + std::to_string(in_deg_[chain[i]]));
    }
  }

  ReductionStep step;
  step.op = ReductionStep::Op::Block1Contract;
  step.nodes.assign(chain.begin(), chain.end());
  set_succ_internal(chain[0], Succ{Succ::Kind::Node, w, Nat{}});
  for (std::size_t i = 1; i < chain.size(); ++i) {
    remove_node(chain[i]);
    step.removed.push_back(chain[i]);
  }
  log_.push_back(std::move(step));
}

void FuncGraph::block1_absorb_chain(std::span<const NodeId> chain) {
  require_distinct_alive_path(*this, chain, "block1_absorb");
  const Succ& tail = succ_[chain.back()];
  if (tail.kind != Succ::Kind::Node) {
    throw std::invalid_argument("block1_absorb: chain must point at a following knot");
  }
  NodeId w = tail.to;
  for (NodeId id : chain) {
    if (id == w) throw std::invalid_argument("block1_absorb: chain closes a cycle");
  }
  RootsInfo ri = roots();
  for (NodeId id : chain) {
    if (ri.cycle_member[id] || (succ_[id].kind == Succ::Kind::Node && succ_[id].to == id)) {
      throw std::invalid_argument("block1_absorb: node " + std::to_string(id) +
                                  " lies on a cycle");
    }
  }
  auto radj = reverse_adjacency();
  absorb_unchecked(chain, w, radj, nullptr);
}

void FuncGraph::absorb_unchecked(std::span<const NodeId> chain, NodeId w,
                                 std::vector<std::vector<NodeId>>& radj,
                                 std::vector<NodeId>* redirected_out) {
  std::unordered_set<NodeId> in_chain(chain.begin(), chain.end());
  ReductionStep step;
  step.op = ReductionStep::Op::Block1Absorb;
  step.nodes.assign(chain.begin(), chain.end());
  for (NodeId id : chain) {
    for (NodeId u : radj[id]) {
      if (!exists_[u] || in_chain.count(u)) continue;
      if (succ_[u].kind != Succ::Kind::Node || succ_[u].to != id) continue;  // stale entry
      set_succ_internal(u, Succ{Succ::Kind::Node, w, Nat{}});
      radj[w].push_back(u);
      if (redirected_out) redirected_out->push_back(u);
    }
  }
  for (NodeId id : chain) {
    remove_node(id);
    step.removed.push_back(id);
  }
  log_.push_back(std::move(step));
}

NodeId FuncGraph::block2_cycle_to_fixed(std::span<const NodeId> cycle) {
  if (cycle.empty()) throw std::invalid_argument("block2: empty cycle");
  std::unordered_set<NodeId> set;
  for (NodeId id : cycle) {
    require_alive(id, "block2");
    if (!set.insert(id).second) throw std::invalid_argument("block2: cycle repeats a node");
  }
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const Succ& s = succ_[cycle[i]];
    NodeId expect = cycle[(i + 1) % cycle.size()];
    if (s.kind != Succ::Kind::Node || s.to != expect) {
      throw std::invalid_argument("block2: nodes do not form a cycle in successor order");
    }
  }

  NodeId survivor = cycle[0];
  for (NodeId id : cycle) {
    bool better = labeled_ ? labels_[id] < labels_[survivor] : id < survivor;
    if (better) survivor = id;
  }

  ReductionStep step;
  step.op = ReductionStep::Op::Block2CycleToFixed;
  step.nodes.assign(cycle.begin(), cycle.end());

  auto radj = reverse_adjacency();
  for (NodeId id : cycle) {
    if (id == survivor) continue;
    for (NodeId u : radj[id]) {
      if (!exists_[u] || set.count(u)) continue;
      if (succ_[u].kind != Succ::Kind::Node || succ_[u].to != id) continue;
      set_succ_internal(u, Succ{Succ::Kind::Node, survivor, Nat{}});
    }
  }
  set_succ_internal(survivor, Succ{Succ::Kind::None, kNoNode, Nat{}});
  for (NodeId id : cycle) {
    if (id == survivor) continue;
    remove_node(id);
    step.removed.push_back(id);
  }
  log_.push_back(std::move(step));
  return survivor;
}

void FuncGraph::block3_prune_no_input(NodeId node) {
  require_alive(node, "block3");
  if (succ_[node].kind == Succ::Kind::None) {
    throw std::invalid_argument("block3: node " + std::to_string(node) +
                                " is a fixed point / sink");
  }
  if (in_deg_[node] != 0) {
    throw std::invalid_argument("block3: node " + std::to_string(node) + " has " +
                                std::to_string(in_deg_[node]) + " input(s)");
  }
  ReductionStep step;
  step.op = ReductionStep::Op::Block3Prune;
  step.nodes = {node};
  remove_node(node);
  step.removed = {node};
  log_.push_back(std::move(step));
}

void FuncGraph::block4_remove_branch(NodeId delegate) {
  require_alive(delegate, "block4");
  const Succ& s = succ_[delegate];
  if (s.kind == Succ::Kind::None) {
    throw std::invalid_argument("block4: delegate is a fixed point");
  }
  if (s.kind == Succ::Kind::Node && s.to == delegate) {
    throw std::invalid_argument("block4: delegate is a fixed point (self-loop)");
  }
  if (s.kind != Succ::Kind::Node) {
    throw std::invalid_argument("block4: delegate's successor must remain in the graph");
  }
  RootsInfo ri = roots();
  if (ri.cycle_member[delegate]) {
    throw std::invalid_argument("block4: delegate is a cycle member");
  }

  // Predecessor closure; in a functional graph a branch is always a tree.
  auto radj = reverse_adjacency();
  std::vector<NodeId> branch{delegate};
  std::unordered_set<NodeId> in_branch{delegate};
  for (std::size_t i = 0; i < branch.size(); ++i) {
    for (NodeId u : radj[branch[i]]) {
      if (!exists_[u]) continue;
      if (succ_[u].kind != Succ::Kind::Node || succ_[u].to != branch[i]) continue;
      if (in_branch.insert(u).second) branch.push_back(u);
    }
  }

  ReductionStep step;
  step.op = ReductionStep::Op::Block4RemoveBranch;
  step.nodes = {delegate};
  // Remove leaves-first so no edge ever dangles.
  for (auto it = branch.rbegin(); it != branch.rend(); ++it) {
    remove_node(*it);
    step.removed.push_back(*it);
  }
  log_.push_back(std::move(step));
}

void FuncGraph::block5_permute_labels(std::vector<std::pair<Nat, Nat>> mapping) {
  if (!labeled_) throw std::invalid_argument("block5: graph has no labels");
  std::sort(mapping.begin(), mapping.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::unordered_map<u128, u128, NatHashRaw> map;
  for (const auto& [from, to] : mapping) {
    if (!find_label(from)) {
      throw std::invalid_argument("block5: " + from.str() + " is not a label of the graph");
    }
    if (!find_label(to)) {
      throw std::invalid_argument("block5: " + to.str() + " is outside the label set");
    }
    if (!map.emplace(from.v, to.v).second) {
      throw std::invalid_argument("block5: label " + from.str() + " mapped twice");
    }
  }
  // Completed with the identity, the map must stay injective.
  std::unordered_set<u128, NatHashRaw> image;
  for (NodeId id : node_ids()) {
    u128 old = labels_[id].v;
    auto it = map.find(old);
    u128 next = it == map.end() ? old : it->second;
    if (!image.insert(next).second) {
      throw std::invalid_argument("block5: mapping sends two labels to " + Nat{next}.str());
    }
  }

  ReductionStep step;
  step.op = ReductionStep::Op::Block5Permute;
  step.label_map = mapping;

  label_index_.clear();
  for (NodeId id : node_ids()) {
    auto it = map.find(labels_[id].v);
    if (it != map.end()) labels_[id] = Nat{it->second};
    label_index_.emplace(labels_[id].v, id);
  }
  log_.push_back(std::move(step));
}

// ---------------------------------------------------------------------------
// Roots and structure
// ---------------------------------------------------------------------------

FuncGraph::RootsInfo FuncGraph::roots() const {
  RootsInfo info;
  info.root_of.assign(succ_.size(), UINT32_MAX);
  info.cycle_member.assign(succ_.size(), false);

  std::map<std::string, std::uint32_t> boundary_roots;  // value -> root index
  std::vector<std::uint8_t> color(succ_.size(), 0);     // 0 new, 1 on path, 2 done
  std::vector<NodeId> path;

  for (NodeId start = 0; start < succ_.size(); ++start) {
    if (!exists_[start] || color[start] == 2) continue;
    path.clear();
    NodeId cur = start;
    std::uint32_t root_id = UINT32_MAX;
    while (true) {
      if (color[cur] == 2) {
        root_id = info.root_of[cur];
        break;
      }
      if (color[cur] == 1) {
        // New cycle: members are the path suffix from cur.
        auto entry = std::find(path.begin(), path.end(), cur);
        std::vector<NodeId> members(entry, path.end());
        std::size_t min_at = 0;
        for (std::size_t i = 1; i < members.size(); ++i) {
          bool better = labeled_ ? labels_[members[i]] < labels_[members[min_at]]
                                 : members[i] < members[min_at];
          if (better) min_at = i;
        }
        std::rotate(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(min_at),
                    members.end());
        Root root;
        if (members.size() == 1) {
          root.kind = Root::Kind::Fixed;  // self-loop knot is a fixed point
          root.fixed_node = members[0];
        } else {
          root.kind = Root::Kind::Cycle;
          root.cycle_nodes = members;
          for (NodeId id : members) info.cycle_member[id] = true;
        }
        root_id = static_cast<std::uint32_t>(info.roots.size());
        info.roots.push_back(std::move(root));
        break;
      }
      color[cur] = 1;
      path.push_back(cur);
      const Succ& s = succ_[cur];
      if (s.kind == Succ::Kind::None) {
        Root root;
        root.kind = Root::Kind::Fixed;
        root.fixed_node = cur;
        root_id = static_cast<std::uint32_t>(info.roots.size());
        info.roots.push_back(std::move(root));
        break;
      }
      if (s.kind == Succ::Kind::Boundary) {
        std::string key = s.boundary_value.str();
        auto it = boundary_roots.find(key);
        if (it != boundary_roots.end()) {
          root_id = it->second;
        } else {
          Root root;
          root.kind = Root::Kind::Boundary;
          root.boundary_value = s.boundary_value;
          root_id = static_cast<std::uint32_t>(info.roots.size());
          info.roots.push_back(std::move(root));
          boundary_roots.emplace(key, root_id);
        }
        break;
      }
      cur = s.to;
    }
    for (NodeId id : path) {
      color[id] = 2;
      info.root_of[id] = root_id;
    }
  }
  for (NodeId id = 0; id < succ_.size(); ++id) {
    if (exists_[id]) ++info.roots[info.root_of[id]].member_count;
  }
  return info;
}

FuncGraph::Structure FuncGraph::strip_labels() const {
  RootsInfo ri = roots();
  Structure out;

  // Child lists over node ids, self-loops dropped; one virtual node per
  // boundary root gathers its exit knots.
  std::size_t n = succ_.size();
  std::size_t total = n + ri.roots.size();
  std::vector<std::vector<std::uint32_t>> children(total);
  std::vector<std::uint32_t> boundary_virtual(ri.roots.size(), 0);
  for (std::size_t r = 0; r < ri.roots.size(); ++r) {
    boundary_virtual[r] = static_cast<std::uint32_t>(n + r);
  }
  for (NodeId id = 0; id < n; ++id) {
    if (!exists_[id]) continue;
    const Succ& s = succ_[id];
    if (s.kind == Succ::Kind::Node && s.to != id) {
      children[s.to].push_back(id);
    } else if (s.kind == Succ::Kind::Boundary) {
      children[boundary_virtual[ri.root_of[id]]].push_back(id);
    }
  }

  for (std::size_t r = 0; r < ri.roots.size(); ++r) {
    const Root& root = ri.roots[r];
    switch (root.kind) {
      case Root::Kind::Cycle: {
        out.cycles.push_back(root.cycle_nodes);
        break;
      }
      case Root::Kind::Fixed: {
        StructureEntry e;
        e.kind = root.kind;
        e.anchor = labeled_ ? labels_[root.fixed_node].str() : std::to_string(root.fixed_node);
        e.form = ahu_encode(children, root.fixed_node);
        out.entries.push_back(std::move(e));
        break;
      }
      case Root::Kind::Boundary: {
        StructureEntry e;
        e.kind = root.kind;
        e.anchor = root.boundary_value.str();
        e.form = ahu_encode(children, boundary_virtual[r]);
        out.entries.push_back(std::move(e));
        break;
      }
    }
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.form, a.kind, a.anchor) < std::tie(b.form, b.kind, b.anchor);
  });
  return out;
}

bool FuncGraph::identical(const FuncGraph& other) const {
  if (exists_ != other.exists_ || labeled_ != other.labeled_) return false;
  for (NodeId id = 0; id < exists_.size(); ++id) {
    if (!exists_[id]) continue;
    if (!(succ_[id] == other.succ_[id])) return false;
    if (labeled_ && labels_[id] != other.labels_[id]) return false;
  }
  return true;
}

void FuncGraph::check_consistency() const {
  std::vector<std::uint32_t> deg(succ_.size(), 0);
  std::unordered_set<u128, NatHashRaw> seen_labels;
  for (NodeId id = 0; id < succ_.size(); ++id) {
    if (!exists_[id]) continue;
    const Succ& s = succ_[id];
    if (s.kind == Succ::Kind::Node) {
      if (!alive(s.to)) throw std::logic_error("dangling successor");
      ++deg[s.to];
    }
    if (labeled_ && !seen_labels.insert(labels_[id].v).second) {
      throw std::logic_error("duplicate label");
    }
  }
  for (NodeId id = 0; id < succ_.size(); ++id) {
    if (exists_[id] && deg[id] != in_deg_[id]) throw std::logic_error("in-degree drift");
  }
}

FuncGraph replay_log(const FuncGraph& original, const std::vector<ReductionStep>& log) {
  FuncGraph g = original;
  for (const ReductionStep& step : log) {
    switch (step.op) {
      case ReductionStep::Op::Block1Contract:
        g.block1_contract_chain(step.nodes);
        break;
      case ReductionStep::Op::Block1Absorb:
        g.block1_absorb_chain(step.nodes);
        break;
      case ReductionStep::Op::Block2CycleToFixed:
        g.block2_cycle_to_fixed(step.nodes);
        break;
      case ReductionStep::Op::Block3Prune:
        g.block3_prune_no_input(step.nodes[0]);
        break;
      case ReductionStep::Op::Block4RemoveBranch:
        g.block4_remove_branch(step.nodes[0]);
        break;
      case ReductionStep::Op::Block5Permute:
        g.block5_permute_labels(step.label_map);
        break;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Composite reductions
// ---------------------------------------------------------------------------

void contract_even_chains(FuncGraph& g) {
  if (!g.labeled()) throw std::invalid_argument("contract_even_chains: graph has no labels");
  {
    FuncGraph::RootsInfo ri = g.roots();
    for (bool m : ri.cycle_member) {
      if (m) {
        throw std::invalid_argument(
            "contract_even_chains: collapse the cycle first (block 2)");
      }
    }
    for (NodeId id : g.node_ids()) {
      if (g.succ(id).kind == Succ::Kind::Node && g.succ(id).to == id) {
        throw std::invalid_argument(
            "contract_even_chains: collapse the self-loop first (block 2)");
      }
    }
  }

  // Group even labels by odd part: each group is one halving run whose odd
  // endpoint absorbs it.
  std::map<u128, std::vector<std::pair<u128, NodeId>>> runs;
  for (NodeId id : g.node_ids()) {
    u128 v = g.label(id).v;
    if (v == 0 || (v & 1)) continue;
    runs[odd_part_u128(v)].push_back({v, id});
  }
  auto radj = g.reverse_adjacency();
  for (auto& [odd, members] : runs) {
    auto target = g.find_label(Nat{odd});
    if (!target) continue;  // run exits the window; leave it alone
    std::sort(members.begin(), members.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<NodeId> chain;
    chain.reserve(members.size());
    for (auto& [v, id] : members) chain.push_back(id);
    // The descending labels must actually chain; windows with holes (lo > 1)
    // can break runs, which absorb would mis-handle.
    bool contiguous = true;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const Succ& s = g.succ(chain[i]);
      if (s.kind != Succ::Kind::Node || s.to != chain[i + 1]) {
        contiguous = false;
        break;
      }
    }
    const Succ& last = g.succ(chain.back());
    if (!contiguous || last.kind != Succ::Kind::Node || last.to != *target) continue;
    g.absorb_unchecked(chain, *target, radj, nullptr);
  }
}

PruneLoopResult prune_no_input_loop(FuncGraph& g, const SystemDef* sys,
                                    std::uint64_t param_cap) {
  PruneLoopResult result;
  bool can_probe = sys != nullptr && sys->has_reverse() && g.labeled();
  ReverseCaps caps;
  caps.param_cap = param_cap;

  // Window bounds for the external-predecessor probe.
  u128 win_lo = 0, win_hi = 0;
  if (can_probe) {
    bool first = true;
    for (NodeId id : g.node_ids()) {
      u128 v = g.label(id).v;
      if (first || v < win_lo) win_lo = v;
      if (first || v > win_hi) win_hi = v;
      first = false;
    }
  }

  auto has_external_input = [&](NodeId id) {
    if (!can_probe) return false;
    Nat label = g.label(id);
    // Labels outside the probing system's own domain (e.g. multiples of
    // three in a collatz window) have no predecessors there at all.
    if (!admits(*sys, label)) return false;
    PredecessorList preds = predecessors(*sys, label, caps);
    for (Nat p : preds.values) {
      if (p.v < win_lo || p.v > win_hi) return true;
    }
    return false;
  };

  while (true) {
    std::vector<NodeId> prunable;
    for (NodeId id : g.node_ids()) {
      if (g.in_degree(id) != 0) continue;
      if (g.succ(id).kind == Succ::Kind::None) continue;  // protected sink
      if (has_external_input(id)) continue;
      prunable.push_back(id);
    }
    if (prunable.empty()) break;
    ++result.passes;
    for (NodeId id : prunable) {
      if (g.labeled()) result.removed_labels.push_back(g.label(id));
      g.block3_prune_no_input(id);
    }
  }
  std::sort(result.removed_labels.begin(), result.removed_labels.end());
  return result;
}

}  // namespace dynsys
