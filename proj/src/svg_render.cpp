#include "fairspace/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fairspace {

namespace {

struct Pt {
  double x = 0.0, y = 0.0;
};

using Poly = std::vector<Pt>;

const char* kFill[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
                       "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac"};
const char* kDot[] = {"#1b3a5c", "#8a4a0b", "#2c5e26", "#8c2628", "#5e3a55",
                      "#356661", "#8a7413", "#a04a53", "#57382b", "#5c5652"};
constexpr int kPalette = 10;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Sutherland-Hodgman against a*p <= b
Poly clip_le(const Poly& poly, double ax, double ay, double b) {
  Poly out;
  int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Pt& cur = poly[i];
    const Pt& prev = poly[(i + n - 1) % n];
    double dc = ax * cur.x + ay * cur.y - b;
    double dp = ax * prev.x + ay * prev.y - b;
    bool in_cur = dc <= 0.0, in_prev = dp <= 0.0;
    if (in_cur != in_prev) {
      double t = dp / (dp - dc);
      out.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
    }
    if (in_cur) out.push_back(cur);
  }
  return out;
}

Poly clip_halfspace(Poly poly, const HalfSpace& h) {
  if (is_vacuous(h)) return poly;
  if (is_empty_halfspace(h)) return {};
  if (h.sense == Sense::Le) return clip_le(poly, h.normal[0], h.normal[1], h.offset);
  return clip_le(poly, -h.normal[0], -h.normal[1], -h.offset);
}

Poly cell_polygon(const ConvexCell& cell, double lo0, double lo1, double hi0, double hi1) {
  Poly poly = {{lo0, lo1}, {hi0, lo1}, {hi0, hi1}, {lo0, hi1}};
  for (const auto& h : cell.constraints) {
    poly = clip_halfspace(std::move(poly), h);
    if (poly.empty()) return poly;
  }
  if (cell.ball) {
    // 128-gon inscribed approximation of the disk constraint
    for (int k = 0; k < 128 && !poly.empty(); ++k) {
      double ang = 2.0 * M_PI * (k + 0.5) / 128.0;
      double ax = std::cos(ang), ay = std::sin(ang);
      double b = ax * cell.ball->center[0] + ay * cell.ball->center[1] +
                 cell.ball->radius * std::cos(M_PI / 128.0);
      poly = clip_le(poly, ax, ay, b);
    }
  }
  return poly;
}

Pt centroid(const Poly& poly) {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Pt& p = poly[i];
    const Pt& q = poly[(i + 1) % n];
    double cr = p.x * q.y - q.x * p.y;
    a2 += cr;
    cx += (p.x + q.x) * cr;
    cy += (p.y + q.y) * cr;
  }
  if (std::abs(a2) < 1e-18) {
    Pt avg;
    for (const auto& p : poly) {
      avg.x += p.x / n;
      avg.y += p.y / n;
    }
    return avg;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

}  // namespace

std::string render_svg(const PartitionFile& pf, const std::vector<Measure>& measures,
                       const std::vector<int>& labels, const RenderOptions& opts) {
  require(pf.dim == 2, "bad-dim", "rendering is only available in dimension 2");
  require(!pf.cells.empty(), "bad-arg", "nothing to render");
  for (const auto& m : measures)
    require(m.dim == 2, "bad-dim", "measure dimension differs from the partition");

  // world box: measure supports, plus any ball constraint, else unit box
  double lo0 = kInf, lo1 = kInf, hi0 = -kInf, hi1 = -kInf;
  for (const auto& m : measures)
    for (int i = 0; i < m.count(); ++i) {
      const double* p = m.point(i);
      lo0 = std::min(lo0, p[0]);
      lo1 = std::min(lo1, p[1]);
      hi0 = std::max(hi0, p[0]);
      hi1 = std::max(hi1, p[1]);
    }
  for (const auto& cell : pf.cells)
    if (cell.ball) {
      lo0 = std::min(lo0, cell.ball->center[0] - cell.ball->radius);
      lo1 = std::min(lo1, cell.ball->center[1] - cell.ball->radius);
      hi0 = std::max(hi0, cell.ball->center[0] + cell.ball->radius);
      hi1 = std::max(hi1, cell.ball->center[1] + cell.ball->radius);
    }
  if (!(lo0 < hi0) || !(lo1 < hi1)) {
    lo0 = lo1 = -1.0;
    hi0 = hi1 = 1.0;
  }
  double span = std::max(hi0 - lo0, hi1 - lo1);
  double pad = opts.pad * span;
  double cx = 0.5 * (lo0 + hi0), cy = 0.5 * (lo1 + hi1);
  lo0 = cx - 0.5 * span - pad;
  hi0 = cx + 0.5 * span + pad;
  lo1 = cy - 0.5 * span - pad;
  hi1 = cy + 0.5 * span + pad;

  double scale = opts.size / (hi0 - lo0);
  auto sx = [&](double x) { return (x - lo0) * scale; };
  auto sy = [&](double y) { return (hi1 - y) * scale; };  // svg y grows downward

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.size << "\" height=\""
      << opts.size << "\" viewBox=\"0 0 " << opts.size << " " << opts.size << "\">\n";
  svg << "<rect width=\"" << opts.size << "\" height=\"" << opts.size
      << "\" fill=\"#ffffff\"/>\n";

  std::vector<int> hidden;
  std::vector<Pt> label_at(pf.cells.size());
  std::vector<char> visible(pf.cells.size(), 0);
  for (std::size_t i = 0; i < pf.cells.size(); ++i) {
    Poly poly = cell_polygon(pf.cells[i], lo0, lo1, hi0, hi1);
    if (poly.size() < 3) {
      hidden.push_back(static_cast<int>(i));
      continue;
    }
    visible[i] = 1;
    label_at[i] = centroid(poly);
    svg << "<path d=\"M";
    for (std::size_t k = 0; k < poly.size(); ++k) {
      if (k) svg << "L";
      svg << num(sx(poly[k].x)) << " " << num(sy(poly[k].y));
    }
    svg << "Z\" fill=\"" << kFill[i % kPalette]
        << "\" fill-opacity=\"0.35\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
  }

  for (std::size_t j = 0; j < measures.size(); ++j) {
    const Measure& m = measures[j];
    int stride = std::max(1, m.count() / std::max(1, opts.max_dots));
    svg << "<g fill=\"" << kDot[j % kPalette] << "\" fill-opacity=\"0.5\">\n";
    for (int i = 0; i < m.count(); i += stride) {
      const double* p = m.point(i);
      svg << "<circle cx=\"" << num(sx(p[0])) << "\" cy=\"" << num(sy(p[1]))
          << "\" r=\"1.6\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g font-family=\"monospace\" font-size=\"16\" fill=\"#111111\">\n";
  for (std::size_t i = 0; i < pf.cells.size(); ++i)
    if (visible[i])
      svg << "<text x=\"" << num(sx(label_at[i].x)) << "\" y=\"" << num(sy(label_at[i].y))
          << "\" text-anchor=\"middle\">C" << i << "</text>\n";
  int line = 0;
  for (int i : hidden)
    svg << "<text x=\"8\" y=\"" << 20 + 18 * line++ << "\">C" << i
        << ": outside the viewport</text>\n";
  for (std::size_t j = 0; j < labels.size(); ++j)
    svg << "<text x=\"8\" y=\"" << 20 + 18 * line++ << "\">measure " << j << " -> C" << labels[j]
        << "</text>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace fairspace
