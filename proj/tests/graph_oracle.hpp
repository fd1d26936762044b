#pragma once

// Test-only helpers: a pseudo-random functional graph generator and a
// brute-force root counter kept independent of FuncGraph::roots().

#include <random>
#include <set>
#include <string>
#include <unordered_set>

#include "dynsys/funcgraph.hpp"

namespace testutil {

using namespace dynsys;

struct BruteRoots {
  std::set<std::string> keys;
  int fixed = 0;
  int cycles = 0;
  int boundary = 0;

  std::size_t total() const { return keys.size(); }
};

// Walks every node independently with a plain visited set; no memoization,
// no shared state with the implementation under test.
inline BruteRoots brute_force_roots(const FuncGraph& g) {
  BruteRoots out;
  for (NodeId start : g.node_ids()) {
    std::unordered_set<NodeId> visited;
    NodeId cur = start;
    std::string key;
    while (true) {
      const Succ& s = g.succ(cur);
      if (s.kind == Succ::Kind::None) {
        key = "fixed:" + std::to_string(cur);
        break;
      }
      if (s.kind == Succ::Kind::Boundary) {
        key = "boundary:" + s.boundary_value.str();
        break;
      }
      if (s.to == cur) {
        key = "fixed:" + std::to_string(cur);
        break;
      }
      if (visited.count(s.to)) {
        // Walk the cycle explicitly to find its minimal member.
        NodeId min_id = s.to;
        NodeId c = g.succ(s.to).to;
        while (c != s.to) {
          min_id = std::min(min_id, c);
          c = g.succ(c).to;
        }
        key = "cycle:" + std::to_string(min_id);
        break;
      }
      visited.insert(cur);
      cur = s.to;
    }
    if (out.keys.insert(key).second) {
      if (key.rfind("fixed:", 0) == 0) ++out.fixed;
      if (key.rfind("cycle:", 0) == 0) ++out.cycles;
      if (key.rfind("boundary:", 0) == 0) ++out.boundary;
    }
  }
  return out;
}

// Random functional graph: labels 1..n, every knot points somewhere (raw
// node, self, or sink), no boundary edges.
inline FuncGraph random_graph(std::mt19937_64& rng, int max_nodes) {
  std::uniform_int_distribution<int> size_dist(2, max_nodes);
  int n = size_dist(rng);
  FuncGraph g;
  std::vector<NodeId> ids;
  for (int i = 0; i < n; ++i) ids.push_back(g.add_node(Nat::of(static_cast<std::uint64_t>(i + 1))));
  std::uniform_int_distribution<int> roll(0, 99);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (NodeId id : ids) {
    int r = roll(rng);
    if (r < 6) {
      g.set_succ_none(id);
    } else if (r < 10) {
      g.set_succ_node(id, id);
    } else {
      g.set_succ_node(id, ids[static_cast<std::size_t>(pick(rng))]);
    }
  }
  return g;
}

}  // namespace testutil
