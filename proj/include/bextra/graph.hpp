#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace bextra {

/// Undirected simple communication network over agents 0..n-1.
/// Edges are stored as (i, j) with i < j, sorted and de-duplicated.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Nodes adjacent to i (sorted, i itself excluded). Throws on bad index.
  const std::vector<int>& neighbors(int i) const;
  int degree(int i) const;
  bool has_edge(int i, int j) const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// True iff a breadth-first search from node 0 reaches all nodes.
bool is_connected(const Graph& g);

/// Connected graph with exactly num_edges edges, deterministic per seed.
/// A random spanning tree (random permutation, random parent attachment)
/// guarantees connectivity; the remaining edges are drawn uniformly from
/// the non-tree pairs.
Graph random_connected_graph(int n, int num_edges, std::uint64_t seed);

/// Edge-list text format: first line "n m", then m lines "i j".
void save_graph(const Graph& g, std::ostream& out);
Graph load_graph(std::istream& in);

}  // namespace bextra
