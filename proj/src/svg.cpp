#include "sigdetect/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sigdetect {

namespace {
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* label_color(const std::string& label) {
  if (label == "completely-detectable") return "#1f77b4";
  if (label == "undetectable") return "#d62728";
  return "#7f7f7f";
}
}  // namespace

std::string render_svg_phase(std::span<const SweepRow> rows,
                             std::span<const std::pair<double, double>> boundary) {
  if (rows.empty()) throw std::invalid_argument("render_svg_phase: rows must be non-empty");
  const double W = 640, H = 480;
  const double ml = 60, mr = 20, mt = 20, mb = 50;
  double bmin = rows[0].beta, bmax = rows[0].beta, rmin = rows[0].r, rmax = rows[0].r;
  for (const auto& row : rows) {
    bmin = std::min(bmin, row.beta);
    bmax = std::max(bmax, row.beta);
    rmin = std::min(rmin, row.r);
    rmax = std::max(rmax, row.r);
  }
  for (const auto& [b, rv] : boundary) {
    bmin = std::min(bmin, b);
    bmax = std::max(bmax, b);
    rmin = std::min(rmin, rv);
    rmax = std::max(rmax, rv);
  }
  if (bmax <= bmin) bmax = bmin + 1.0;
  if (rmax <= rmin) rmax = rmin + 1.0;
  auto X = [&](double beta) { return ml + (beta - bmin) / (bmax - bmin) * (W - ml - mr); };
  auto Y = [&](double r) { return H - mb - (r - rmin) / (rmax - rmin) * (H - mt - mb); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
       "height=\"480\" viewBox=\"0 0 640 480\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(W - ml - mr) +
       "\" height=\"" + num(H - mt - mb) +
       "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  if (!boundary.empty()) {
    s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (const auto& [b, rv] : boundary) s += num(X(b)) + "," + num(Y(rv)) + " ";
    s += "\"/>\n";
  }
  for (const auto& row : rows) {
    s += "<circle cx=\"" + num(X(row.beta)) + "\" cy=\"" + num(Y(row.r)) +
         "\" r=\"4\" fill=\"" + label_color(row.label) + "\"/>\n";
  }
  s += "<text x=\"" + num(W / 2) + "\" y=\"" + num(H - 12) +
       "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">beta</text>\n";
  s += "<text x=\"16\" y=\"" + num(H / 2) +
       "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
       "transform=\"rotate(-90 16 " + num(H / 2) + ")\">r</text>\n";
  double ly = mt + 14;
  for (const char* lab : {"completely-detectable", "detectable", "undetectable"}) {
    s += "<circle cx=\"" + num(ml + 12) + "\" cy=\"" + num(ly - 4) + "\" r=\"4\" fill=\"" +
         std::string(label_color(lab)) + "\"/>\n";
    s += "<text x=\"" + num(ml + 22) + "\" y=\"" + num(ly) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + lab + "</text>\n";
    ly += 16;
  }
  s += "<text x=\"" + num(ml + 12) + "\" y=\"" + num(ly) +
       "\" font-family=\"sans-serif\" font-size=\"12\">boundary r*(beta)</text>\n";
  s += "</svg>\n";
  return s;
}

void write_svg_phase(std::span<const SweepRow> rows,
                     std::span<const std::pair<double, double>> boundary,
                     const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_svg_phase: cannot open " + path);
  f << render_svg_phase(rows, boundary);
  if (!f) throw std::runtime_error("write_svg_phase: write failed for " + path);
}

}  // namespace sigdetect
