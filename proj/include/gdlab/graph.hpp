#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gdlab/error.hpp"

namespace gdlab {

using NodeId = std::size_t;

/// Undirected edge; endpoints are stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph.
class Graph {
 public:
  Graph() : Graph(1, {}) {}

  /// Throws std::invalid_argument on self-loops, duplicates or out-of-range endpoints.
  Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), adj_(n) {
    if (n_ == 0) throw std::invalid_argument("graph needs at least one node");
    for (const Edge& e : edges_) {
      if (e.v >= n_) {
        throw std::invalid_argument("edge endpoint " + std::to_string(e.v) + " out of range for n=" +
                                    std::to_string(n_));
      }
      if (e.u == e.v) throw std::invalid_argument("self-loop at node " + std::to_string(e.u));
      adj_[e.u].push_back(e.v);
      adj_[e.v].push_back(e.u);
    }
    for (NodeId v = 0; v < n_; ++v) {
      auto& nb = adj_[v];
      std::sort(nb.begin(), nb.end());
      if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
        throw std::invalid_argument("duplicate edge at node " + std::to_string(v));
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adj_.at(v); }
  std::size_t degree(NodeId v) const { return adj_.at(v).size(); }

  bool adjacent(NodeId a, NodeId b) const {
    const auto& nb = adj_.at(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adj_;
};

/// Nodes reachable from `start`, in BFS order with ascending-index tie-break.
inline std::vector<NodeId> reachable_from(const Graph& g, NodeId start) {
  std::vector<NodeId> order;
  order.reserve(g.size());
  std::vector<bool> seen(g.size(), false);
  std::queue<NodeId> frontier;
  seen[start] = true;
  frontier.push(start);
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop();
    order.push_back(v);
    for (NodeId w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  return order;
}

inline bool is_connected(const Graph& g) { return reachable_from(g, 0).size() == g.size(); }

/// Throws DisconnectedGraphError listing the nodes not reachable from `start`.
inline void require_connected(const Graph& g, NodeId start = 0) {
  auto order = reachable_from(g, start);
  if (order.size() == g.size()) return;
  std::vector<bool> seen(g.size(), false);
  for (NodeId v : order) seen[v] = true;
  // report the component of the smallest unreachable node
  NodeId first = 0;
  while (seen[first]) ++first;
  auto component = reachable_from(g, first);
  std::sort(component.begin(), component.end());
  throw DisconnectedGraphError(std::move(component));
}

inline bool is_tree(const Graph& g) { return g.edge_count() + 1 == g.size() && is_connected(g); }

/// Breadth-first node order from `start`. Neighbors are visited in ascending
/// index order, so the result depends only on (g, start).
inline std::vector<NodeId> bfs_order(const Graph& g, NodeId start) {
  if (start >= g.size()) throw std::invalid_argument("BFS start node out of range");
  require_connected(g, start);
  return reachable_from(g, start);
}

/// BFS order from a start node drawn uniformly from `rng`.
template <class Rng>
std::vector<NodeId> bfs_order(const Graph& g, Rng& rng) {
  std::uniform_int_distribution<NodeId> pick(0, g.size() - 1);
  return bfs_order(g, pick(rng));
}

/// BFS-ordered model input: position i holds node order[i] and a k-wide
/// binary vector whose slot j marks adjacency to the node at position i-1-j.
class EncodedSequence {
 public:
  EncodedSequence(std::vector<NodeId> order, std::size_t k, std::vector<std::uint8_t> bits)
      : order_(std::move(order)), k_(k), bits_(std::move(bits)) {}

  std::size_t length() const noexcept { return order_.size(); }
  std::size_t width() const noexcept { return k_; }
  const std::vector<NodeId>& order() const noexcept { return order_; }
  std::uint8_t feature(std::size_t pos, std::size_t slot) const { return bits_[pos * k_ + slot]; }
  std::span<const std::uint8_t> features(std::size_t pos) const {
    return std::span<const std::uint8_t>(bits_).subspan(pos * k_, k_);
  }

 private:
  std::vector<NodeId> order_;
  std::size_t k_;
  std::vector<std::uint8_t> bits_;
};

/// Adjacency to nodes further than k positions back is dropped.
inline EncodedSequence encode_features(const Graph& g, std::vector<NodeId> order, std::size_t k) {
  const std::size_t n = g.size();
  if (k == 0) throw std::invalid_argument("feature width k must be >= 1");
  if (order.size() != n) throw std::invalid_argument("order is not a permutation of the graph's nodes");
  std::vector<bool> seen(n, false);
  for (NodeId v : order) {
    if (v >= n || seen[v]) throw std::invalid_argument("order is not a permutation of the graph's nodes");
    seen[v] = true;
  }
  std::vector<std::uint8_t> bits(n * k, 0);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < k && j < i; ++j) {
      if (g.adjacent(order[i], order[i - 1 - j])) bits[i * k + j] = 1;
    }
  }
  return EncodedSequence(std::move(order), k, std::move(bits));
}

/// Hop distances between all node pairs.
class DistanceMatrix {
 public:
  static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, kUnreachable) {
    for (std::size_t i = 0; i < n; ++i) d_[i * n + i] = 0;
  }

  std::size_t size() const noexcept { return n_; }
  std::uint32_t operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::uint32_t& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  bool connected() const {
    return std::none_of(d_.begin(), d_.end(), [](std::uint32_t x) { return x == kUnreachable; });
  }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> d_;
};

/// All-pairs hop distances by one BFS per source. Throws on disconnected graphs.
inline DistanceMatrix shortest_path_matrix(const Graph& g) {
  require_connected(g);
  const std::size_t n = g.size();
  DistanceMatrix dm(n);
  std::vector<NodeId> queue(n);
  for (NodeId s = 0; s < n; ++s) {
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      NodeId v = queue[head++];
      const std::uint32_t dv = dm(s, v);
      for (NodeId w : g.neighbors(v)) {
        if (dm(s, w) == DistanceMatrix::kUnreachable) {
          dm.at(s, w) = dv + 1;
          queue[tail++] = w;
        }
      }
    }
  }
  return dm;
}

}  // namespace gdlab
