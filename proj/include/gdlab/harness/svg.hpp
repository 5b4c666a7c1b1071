#pragma once

#include <algorithm>
#include <cstdio>
#include <string>

#include "gdlab/graph.hpp"
#include "gdlab/layout.hpp"

namespace gdlab::harness {

struct SvgStyle {
  double size = 800.0;
  double margin = 0.05;  // fraction of size left empty on each side
  double node_radius = 4.0;
  double edge_width = 1.0;
  std::string node_fill = "#1f77b4";
  std::string edge_stroke = "#555555";
  std::string comment;  // written as an XML comment when non-empty
};

/// Draws edges as lines and nodes as circles. The layout is scaled uniformly
/// into the square viewbox inside the margin and centered.
inline std::string render_svg(const Graph& g, const Layout& l, const SvgStyle& style = {}) {
  require_matching(g, l);
  const BoundingBox b = bounding_box(l);
  const double inner = style.size * (1.0 - 2.0 * style.margin);
  const double extent = std::max(b.width(), b.height());
  const double scale = extent > 0.0 ? inner / extent : 0.0;
  const double ox = (style.size - b.width() * scale) / 2.0;
  const double oy = (style.size - b.height() * scale) / 2.0;
  auto map = [&](const Point& p) { return Point{ox + (p.x - b.min.x) * scale, oy + (p.y - b.min.y) * scale}; };

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                style.size, style.size, style.size, style.size);
  out += buf;
  if (!style.comment.empty()) out += "<!-- " + style.comment + " -->\n";
  std::snprintf(buf, sizeof buf, "<g stroke=\"%s\" stroke-width=\"%.2f\">\n", style.edge_stroke.c_str(), style.edge_width);
  out += buf;
  for (const Edge& e : g.edges()) {
    const Point a = map(l[e.u]), c = map(l[e.v]);
    std::snprintf(buf, sizeof buf, "<line x1=\"%.4f\" y1=\"%.4f\" x2=\"%.4f\" y2=\"%.4f\"/>\n", a.x, a.y, c.x, c.y);
    out += buf;
  }
  out += "</g>\n";
  std::snprintf(buf, sizeof buf, "<g fill=\"%s\">\n", style.node_fill.c_str());
  out += buf;
  for (std::size_t v = 0; v < l.size(); ++v) {
    const Point p = map(l[v]);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.4f\" cy=\"%.4f\" r=\"%.2f\"/>\n", p.x, p.y, style.node_radius);
    out += buf;
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace gdlab::harness
