#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "sigdetect/rng.hpp"
#include "sigdetect/shape.hpp"

using namespace sigdetect;

namespace {
// Riemann-grid oracle for the level-set functionals.
ShapeFunction::LevelSet brute_superlevel(const ShapeFunction& h, double c, int grid = 2000000) {
  ShapeFunction::LevelSet out{0.0, 0.0, 0.0};
  for (int i = 0; i < grid; ++i) {
    double u = (i + 0.5) / grid;
    double v = h(u);
    if (v > c) {
      out.measure += 1.0 / grid;
      out.h_mass += v / grid;
    } else {
      out.h2_sublevel += v * v / grid;
    }
  }
  return out;
}
}  // namespace

TEST_CASE("power-law moments and cdf") {
  auto h = ShapeFunction::power_law(0.25);
  CHECK(h.l2() == doctest::Approx(1.125).epsilon(1e-14));
  CHECK(h.mean() == doctest::Approx(0.75 / 1.75).epsilon(1e-14));
  CHECK(h.cdf(1.0) == doctest::Approx(1.0));
  CHECK(h.cdf(0.5) == doctest::Approx(std::pow(0.5, 0.75)).epsilon(1e-14));
  CHECK(h.quantile(h.cdf(0.37)) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(!ShapeFunction::power_law(0.5).l2_finite());
  CHECK(!ShapeFunction::power_law(0.75).l2_finite());
  CHECK_THROWS_AS(ShapeFunction::power_law(1.0), std::invalid_argument);
}

TEST_CASE("l2p closed forms") {
  CHECK(ShapeFunction::constant().l2p(0.5) == doctest::Approx(1.0));
  CHECK(ShapeFunction::linear2x().l2p(0.5) ==
        doctest::Approx(std::pow(2.0, 2.5) / 3.5).epsilon(1e-13));
  auto h = ShapeFunction::power_law(0.3);
  CHECK(h.l2p(0.5) == doctest::Approx(std::pow(0.7, 2.5) / (1.0 - 2.5 * 0.3)).epsilon(1e-13));
  CHECK(ShapeFunction::power_law(0.45).l2p(0.5) == std::numeric_limits<double>::infinity());
}

TEST_CASE("tabulated density normalizes, interpolates, and integrates moments") {
  // triangle hat: h(0)=0, h(1/2)=2, h(1)=0
  auto h = ShapeFunction::tabulated({0.0, 0.5, 1.0}, {0.0, 2.0, 0.0});
  CHECK(h(0.25) == doctest::Approx(1.0));
  CHECK(h.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(h.mean() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h.l2() == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(h.quantile(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(ShapeFunction::tabulated({0.0, 1.0}, {1.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(ShapeFunction::tabulated({0.0, 0.5}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("superlevel functionals match the grid oracle") {
  std::vector<ShapeFunction> shapes = {
      ShapeFunction::constant(), ShapeFunction::linear2x(), ShapeFunction::power_law(0.6),
      ShapeFunction::tabulated({0.0, 0.3, 0.7, 1.0},
                               {8.0 / 3, 8.0 / 15, 16.0 / 15, 4.0 / 15})};
  for (const auto& h : shapes) {
    for (double c : {0.2, 0.8, 1.3, 2.2}) {
      auto exact = h.superlevel(c);
      auto brute = brute_superlevel(h, c);
      CAPTURE(h.label());
      CAPTURE(c);
      CHECK(exact.measure == doctest::Approx(brute.measure).epsilon(5e-4));
      CHECK(exact.h_mass == doctest::Approx(brute.h_mass).epsilon(5e-3));
      CHECK(exact.h2_sublevel == doctest::Approx(brute.h2_sublevel).epsilon(5e-3));
    }
  }
}

TEST_CASE("power-law h2 sublevel stays finite beyond a = 1/2") {
  auto h = ShapeFunction::power_law(0.5);
  auto ls = h.superlevel(2.0);
  double xs = std::pow(0.25, 2.0);  // ((1-a)/c)^{1/a}
  CHECK(ls.h2_sublevel == doctest::Approx(0.25 * std::log(1.0 / xs)).epsilon(1e-12));
}

TEST_CASE("inverse-CDF transform reproduces the power law") {
  // U -> U^{1/(1-a)}: empirical mean matches (1-a)/(2-a) within 3 sigma
  const double a = 0.25;
  auto h = ShapeFunction::power_law(a);
  Stream s(99);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = h.quantile(s.next_uniform());
    sum += x;
    sq += x * x;
  }
  const double mean = (1.0 - a) / (2.0 - a);
  const double second = (1.0 - a) / (3.0 - a);  // ∫ x^2 h
  const double sd = std::sqrt((second - mean * mean) / n);
  CHECK(std::fabs(sum / n - mean) < 3.0 * sd);
  CHECK(std::fabs(sq / n - second) < 5.0 * std::sqrt(second / n));
}

TEST_CASE("integrate_against uses the quantile substitution") {
  auto h = ShapeFunction::power_law(0.45);
  CHECK(h.integrate_against([](double x) { return x; }) ==
        doctest::Approx(h.mean()).epsilon(1e-9));
  CHECK(h.integrate_against([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
}
