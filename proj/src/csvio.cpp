#include "sigdetect/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sigdetect {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

static const char* kHeader = "family,beta,r,shape,analytic_side,label,hc_power,llr_power,reps,seed";

std::string render_csv(std::span<const SweepRow> rows) {
  std::string out = kHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += csv_escape(row.family);
    out += ',';
    out += format_double(row.beta);
    out += ',';
    out += format_double(row.r);
    out += ',';
    out += csv_escape(row.shape);
    out += ',';
    out += row.analytic_side;
    out += ',';
    out += row.label;
    out += ',';
    if (row.hc_power) out += format_double(*row.hc_power);
    out += ',';
    if (row.llr_power) out += format_double(*row.llr_power);
    out += ',';
    out += std::to_string(row.reps);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

void write_csv(std::span<const SweepRow> rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  f << render_csv(rows);
  if (!f) throw std::runtime_error("write_csv: write failed for " + path);
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}
}  // namespace

std::vector<SweepRow> parse_csv(const std::string& text) {
  std::vector<SweepRow> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != kHeader) throw std::runtime_error("parse_csv: unexpected header: " + line);
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 10) throw std::runtime_error("parse_csv: bad field count in: " + line);
    SweepRow row;
    row.family = f[0];
    row.beta = std::stod(f[1]);
    row.r = std::stod(f[2]);
    row.shape = f[3];
    row.analytic_side = f[4];
    row.label = f[5];
    if (!f[6].empty()) row.hc_power = std::stod(f[6]);
    if (!f[7].empty()) row.llr_power = std::stod(f[7]);
    row.reps = std::stoll(f[8]);
    row.seed = std::stoull(f[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sigdetect
