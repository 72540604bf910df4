//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/render.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gcnx/random.h"

namespace gcnx {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<std::array<double, 2>> layout_molecule(const Molecule &molecule,
                                                   std::uint64_t seed) {
  const int n = molecule.n_atoms();
  Rng rng(seed);
  std::vector<std::array<double, 2>> pos(static_cast<std::size_t>(n));
  for (auto &p : pos) p = {rng.uniform(-1.0, 1.0) * n * 0.3, rng.uniform(-1.0, 1.0) * n * 0.3};
  if (n < 2) return pos;
  const auto &adj = molecule.graph.adjacency();
  for (int iter = 0; iter < 500; ++iter) {
    const double step = 0.1 * (1.0 - iter / 500.0) + 0.005;
    std::vector<std::array<double, 2>> force(static_cast<std::size_t>(n), {0.0, 0.0});
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
        double d2 = std::max(dx * dx + dy * dy, 1e-6);
        double d = std::sqrt(d2);
        double f = 0.6 / d2;  // repulsion
        if (adj(i, j) != 0.0) f -= 2.0 * (d - 1.0);  // spring
        force[i][0] += f * dx / d;
        force[i][1] += f * dy / d;
        force[j][0] -= f * dx / d;
        force[j][1] -= f * dy / d;
      }
    for (int i = 0; i < n; ++i) {
      const double mag = std::hypot(force[i][0], force[i][1]);
      const double scale = mag > 1.0 ? 1.0 / mag : 1.0;
      pos[i][0] += step * force[i][0] * scale;
      pos[i][1] += step * force[i][1] * scale;
    }
  }
  return pos;
}

std::string render_svg(const Molecule &molecule, const std::vector<Heatmap> &panels,
                       const std::string &title, std::uint64_t seed) {
  const auto pos = layout_molecule(molecule, seed);
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i == 0 || pos[i][0] < min_x) min_x = pos[i][0];
    if (i == 0 || pos[i][0] > max_x) max_x = pos[i][0];
    if (i == 0 || pos[i][1] < min_y) min_y = pos[i][1];
    if (i == 0 || pos[i][1] > max_y) max_y = pos[i][1];
  }
  const double scale = 40.0, margin = 40.0;
  const double panel_w = (max_x - min_x) * scale + 2 * margin;
  const double panel_h = (max_y - min_y) * scale + 2 * margin + 20;
  double vmax = 0.0;
  for (const auto &h : panels)
    for (double v : h.values) vmax = std::max(vmax, v);

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
                    + num(panel_w * std::max<std::size_t>(1, panels.size()))
                    + "\" height=\"" + num(panel_h) + "\">\n";
  svg += "<title>" + escape(title) + "</title>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Heatmap &h = panels[p];
    const double ox = p * panel_w + margin - min_x * scale;
    const double oy = margin + 20 - min_y * scale;
    auto px = [&](int i) { return ox + pos[i][0] * scale; };
    auto py = [&](int i) { return oy + pos[i][1] * scale; };
    svg += "<g>\n<text x=\"" + num(p * panel_w + 8) + "\" y=\"16\" font-size=\"12\">"
           + escape(std::string(method_name(h.method)) + " class "
                    + std::to_string(h.class_id))
           + "</text>\n";
    for (std::size_t i = 0; i < h.values.size(); ++i) {
      const double t = vmax > 0.0 ? h.values[i] / vmax : 0.0;
      const int r = static_cast<int>(std::lround(255 * (1.0 - t)));
      const int g = static_cast<int>(std::lround(255 * (1.0 - 0.6 * t)));
      char color[16];
      std::snprintf(color, sizeof color, "#%02x%02xff", r, g);
      svg += "<circle cx=\"" + num(px(static_cast<int>(i))) + "\" cy=\""
             + num(py(static_cast<int>(i))) + "\" r=\"14\" fill=\"" + color + "\"/>\n";
    }
    for (const Bond &b : molecule.bonds) {
      svg += "<line x1=\"" + num(px(b.i)) + "\" y1=\"" + num(py(b.i)) + "\" x2=\""
             + num(px(b.j)) + "\" y2=\"" + num(py(b.j))
             + "\" stroke=\"black\" stroke-width=\""
             + (b.order == BondOrder::kSingle ? "1.5" : "3")
             + (b.order == BondOrder::kAromatic ? "\" stroke-dasharray=\"4,2" : "")
             + "\"/>\n";
    }
    for (int i = 0; i < molecule.n_atoms(); ++i) {
      svg += "<text x=\"" + num(px(i)) + "\" y=\"" + num(py(i) + 4)
             + "\" font-size=\"11\" text-anchor=\"middle\">"
             + escape(to_string(molecule.graph.node_elements()[i])) + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_dot(const Molecule &molecule, const Heatmap &heatmap) {
  double vmax = 0.0;
  for (double v : heatmap.values) vmax = std::max(vmax, v);
  std::string dot = "graph molecule {\n  node [shape=circle, style=filled];\n";
  for (int i = 0; i < molecule.n_atoms(); ++i) {
    const double t = vmax > 0.0 ? heatmap.values[i] / vmax : 0.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "  a%d [label=\"%s\", fillcolor=\"0.667 %.3f 1.000\"];\n", i,
                  to_string(molecule.graph.node_elements()[i]).c_str(), t);
    dot += buf;
  }
  for (const Bond &b : molecule.bonds) {
    dot += "  a" + std::to_string(b.i) + " -- a" + std::to_string(b.j);
    if (b.order != BondOrder::kSingle)
      dot += " [label=\"" + std::to_string(static_cast<int>(b.order)) + "\"]";
    dot += ";\n";
  }
  return dot + "}\n";
}

}  // namespace gcnx
