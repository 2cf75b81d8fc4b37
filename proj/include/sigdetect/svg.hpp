// svg.hpp - static SVG rendering of phase diagrams and power curves.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sigdetect/montecarlo.hpp"

namespace sigdetect {

/// 640x480 SVG 1.1 phase diagram: grid points colored by classifier label,
/// the analytic boundary polyline, and a legend. Byte-identical output for
/// identical input.
std::string render_svg_phase(std::span<const SweepRow> rows,
                             std::span<const std::pair<double, double>> boundary);
void write_svg_phase(std::span<const SweepRow> rows,
                     std::span<const std::pair<double, double>> boundary,
                     const std::string& path);

}  // namespace sigdetect
