#include "bextra/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace bextra {

Graph::Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Graph: agent count must be positive");
  edges_.reserve(edges.size());
  for (auto [i, j] : edges) {
    if (i == j) throw std::invalid_argument("Graph: self-loop at node " + std::to_string(i));
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("Graph: edge index out of range");
    edges_.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(edges_.begin(), edges_.end());
  auto last = std::unique(edges_.begin(), edges_.end());
  if (last != edges_.end()) throw std::invalid_argument("Graph: duplicate edge");
  adjacency_.resize(n_);
  for (auto [i, j] : edges_) {
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

const std::vector<int>& Graph::neighbors(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("Graph::neighbors: node index out of range");
  return adjacency_[i];
}

int Graph::degree(int i) const { return static_cast<int>(neighbors(i).size()); }

bool Graph::has_edge(int i, int j) const {
  if (i == j) return false;
  const auto& adj = neighbors(std::min(i, j));
  return std::binary_search(adj.begin(), adj.end(), std::max(i, j));
}

bool is_connected(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n;
}

Graph random_connected_graph(int n, int num_edges, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("random_connected_graph: n must be positive");
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  if (num_edges < n - 1 || num_edges > max_edges)
    throw std::invalid_argument("random_connected_graph: edge count " + std::to_string(num_edges) +
                                " infeasible for n=" + std::to_string(n) + " (need " +
                                std::to_string(n - 1) + ".." + std::to_string(max_edges) + ")");

  std::mt19937_64 rng(seed);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::pair<int, int>> edges;
  edges.reserve(num_edges);
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    int parent = perm[pick(rng)];
    edges.emplace_back(std::min(parent, perm[k]), std::max(parent, perm[k]));
  }

  std::vector<char> in_tree(static_cast<std::size_t>(n) * n, 0);
  for (auto [i, j] : edges) in_tree[static_cast<std::size_t>(i) * n + j] = 1;
  std::vector<std::pair<int, int>> candidates;
  candidates.reserve(static_cast<std::size_t>(max_edges) - edges.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!in_tree[static_cast<std::size_t>(i) * n + j]) candidates.emplace_back(i, j);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const int extra = num_edges - static_cast<int>(edges.size());
  edges.insert(edges.end(), candidates.begin(), candidates.begin() + extra);

  return Graph(n, std::move(edges));
}

void save_graph(const Graph& g, std::ostream& out) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Graph load_graph(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("load_graph: malformed header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  for (int k = 0; k < m; ++k) {
    int i = 0, j = 0;
    if (!(in >> i >> j)) throw std::runtime_error("load_graph: truncated edge list");
    edges.emplace_back(i, j);
  }
  return Graph(n, std::move(edges));
}

}  // namespace bextra
