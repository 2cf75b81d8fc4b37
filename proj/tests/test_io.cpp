#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sigdetect/config.hpp"
#include "sigdetect/csvio.hpp"
#include "sigdetect/svg.hpp"

using namespace sigdetect;

namespace {
SweepRow sample_row(double beta, double r, const std::string& label) {
  SweepRow row;
  row.family = "chimeric";
  row.beta = beta;
  row.r = r;
  row.shape = "const";
  row.analytic_side = r > 2 * beta - 1 ? "above" : "below";
  row.label = label;
  row.reps = 100;
  row.seed = 7;
  return row;
}
}  // namespace

TEST_CASE("format_double survives the round trip") {
  for (double v : {0.1, 1.0 / 3.0, 2e-9, 123456.789, 1e-300, 0.46754446796632413}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("csv quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("single row gives exactly two lines") {
  std::vector<SweepRow> rows = {sample_row(0.75, 0.9, "completely-detectable")};
  std::string text = render_csv(rows);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("csv renders deterministically and parses back") {
  std::vector<SweepRow> rows;
  rows.push_back(sample_row(0.6, 0.05, "undetectable"));
  rows.push_back(sample_row(0.75, 0.9, "completely-detectable"));
  rows[0].hc_power = 1.0 / 3.0;
  rows[0].llr_power = 0.046999999999999993;
  std::string a = render_csv(rows);
  std::string b = render_csv(rows);
  CHECK(a == b);
  auto parsed = parse_csv(a);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].beta == rows[0].beta);
  CHECK(parsed[0].hc_power.has_value());
  CHECK(*parsed[0].hc_power == *rows[0].hc_power);
  CHECK(*parsed[0].llr_power == *rows[0].llr_power);
  CHECK(!parsed[1].hc_power.has_value());
  CHECK(parsed[1].label == "completely-detectable");
  CHECK(parsed[1].seed == 7);
  // string-level round trip
  CHECK(render_csv(parsed) == a);
}

TEST_CASE("csv file write/read") {
  std::vector<SweepRow> rows = {sample_row(0.7, 0.3, "undetectable")};
  auto path = std::filesystem::temp_directory_path() / "sigdetect_io_test.csv";
  write_csv(rows, path.string());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == render_csv(rows));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_csv(rows, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST_CASE("svg output is byte-identical and carries the boundary") {
  std::vector<SweepRow> rows = {sample_row(0.6, 0.1, "undetectable"),
                                sample_row(0.9, 1.0, "completely-detectable")};
  std::vector<std::pair<double, double>> boundary = {{0.5, 0.0}, {1.0, 1.0}};
  std::string a = render_svg_phase(rows, boundary);
  std::string b = render_svg_phase(rows, boundary);
  CHECK(a == b);
  CHECK(a.find("<svg") == 0);
  CHECK(a.find("viewBox=\"0 0 640 480\"") != std::string::npos);
  CHECK(a.find("polyline") != std::string::npos);
  CHECK(a.find("completely-detectable") != std::string::npos);
  std::vector<SweepRow> none;
  CHECK_THROWS_AS(render_svg_phase(none, boundary), std::invalid_argument);
}

TEST_CASE("flat config parsing") {
  auto cfg = parse_config("# comment\nseed = 42\n reps=100 # inline\n\nalpha = 0.05\n");
  CHECK(cfg.at("seed") == "42");
  CHECK(cfg.at("reps") == "100");
  CHECK(cfg.at("alpha") == "0.05");
  CHECK_THROWS_AS(parse_config("not a pair\n"), std::runtime_error);
  auto merged = merge_config(cfg, {{"seed", "7"}});
  CHECK(merged.at("seed") == "7");
  CHECK(merged.at("alpha") == "0.05");
}
