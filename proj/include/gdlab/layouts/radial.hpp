#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab {

/// Radial drawing of a tree: depth d goes on the circle of radius d, and each
/// subtree owns an angular wedge proportional to its leaf count. Below the
/// root, a node's children are kept within 2*acos(d/(d+1)) around it so the
/// edges into the next ring cannot cut across a neighboring wedge.
inline Layout radial_tree_layout(const Graph& t, NodeId root) {
  const std::size_t n = t.size();
  if (root >= n) throw std::invalid_argument("radial layout: root out of range");
  if (!is_tree(t)) throw std::invalid_argument("radial layout: input graph is not a tree");

  const std::vector<NodeId> order = bfs_order(t, root);
  std::vector<NodeId> parent(n, root);
  std::vector<int> depth(n, 0);
  std::vector<bool> placed(n, false);
  placed[root] = true;
  for (NodeId v : order) {
    for (NodeId w : t.neighbors(v)) {
      if (placed[w]) continue;
      placed[w] = true;
      parent[w] = v;
      depth[w] = depth[v] + 1;
    }
  }
  // children are visited before their parent in reverse BFS order
  std::vector<double> leaves(n, 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    if (leaves[v] == 0.0) leaves[v] = 1.0;
    if (v != root) leaves[parent[v]] += leaves[v];
  }

  std::vector<double> wedge_start(n, 0.0), wedge_width(n, 0.0), angle(n, 0.0);
  wedge_width[root] = 2.0 * std::numbers::pi;
  std::vector<Point> pts(n);
  for (NodeId v : order) {
    double start = wedge_start[v];
    double width = wedge_width[v];
    if (v != root) {
      const double d = depth[v];
      const double limit = 2.0 * std::acos(d / (d + 1.0));
      if (width > limit) {
        start = angle[v] - 0.5 * limit;
        width = limit;
      }
    }
    double cursor = start;
    for (NodeId w : t.neighbors(v)) {
      if (w == parent[v] && v != root) continue;
      const double share = width * leaves[w] / leaves[v];
      wedge_start[w] = cursor;
      wedge_width[w] = share;
      angle[w] = cursor + 0.5 * share;
      cursor += share;
      const double r = depth[w];
      pts[w] = {r * std::cos(angle[w]), r * std::sin(angle[w])};
    }
  }
  pts[root] = {0.0, 0.0};
  return Layout(std::move(pts));
}

}  // namespace gdlab
