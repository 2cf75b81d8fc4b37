// csvio.hpp - deterministic CSV emission for sweep tables.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "sigdetect/montecarlo.hpp"

namespace sigdetect {

/// Doubles rendered with 17 significant digits so parsing them back is exact.
std::string format_double(double v);

/// RFC 4180 field quoting ('.' decimal separator, UTF-8, LF line endings).
std::string csv_escape(const std::string& field);

std::string render_csv(std::span<const SweepRow> rows);
void write_csv(std::span<const SweepRow> rows, const std::string& path);

/// Parse the output of render_csv back into rows (round-trip checking).
std::vector<SweepRow> parse_csv(const std::string& text);

}  // namespace sigdetect
