#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sigdetect/detectability.hpp"
#include "sigdetect/quadrature.hpp"
#include "sigdetect/rng.hpp"
#include "sigdetect/special.hpp"

using namespace sigdetect;

namespace {
// Quadrature oracle for the I-sums, integrating the indicator directly.
ISumReport brute_i_sums(const DetectionModel& m, double x) {
  const double n = static_cast<double>(m.n);
  const double eps = m.epsilon_raw();
  ISumReport rep;
  rep.x = x;
  rep.n = m.n;
  if (m.noise == Noise::UniformUnit) {
    const int grid = 4000000;
    double i1 = 0.0, i2 = 0.0;
    const double kap = m.kappa();
    // resolve (0, kappa) and (kappa, 1) separately
    for (int piece = 0; piece < 2; ++piece) {
      double lo = piece == 0 ? 0.0 : kap;
      double hi = piece == 0 ? kap : 1.0;
      if (hi <= lo) continue;
      for (int i = 0; i < grid; ++i) {
        double u = lo + (hi - lo) * (i + 0.5) / grid;
        double f = m.signal_density_ratio(u);
        double w = (hi - lo) / grid;
        if (eps * f > x)
          i1 += f * w;
        else
          i2 += f * f * w;
      }
    }
    rep.i1 = n * eps * i1;
    rep.i2 = n * eps * eps * (i2 - 1.0);
    return rep;
  }
  const int grid = 2000000;
  const double ymax = std::max(15.0, m.theta() + 15.0 * m.normal_shift().sigma0);
  double i1 = 0.0, i2 = 0.0;
  for (int i = 0; i < grid; ++i) {
    double y = -ymax + 2.0 * ymax * (i + 0.5) / grid;
    double f = m.signal_density_ratio(y);
    double w = 2.0 * ymax / grid * norm_pdf(y);
    if (eps * f > x)
      i1 += f * w;
    else
      i2 += f * f * w;
  }
  rep.i1 = n * eps * i1;
  rep.i2 = n * eps * eps * (i2 - 1.0);
  return rep;
}
}  // namespace

TEST_CASE("i_sums closed cases") {
  auto m = make_chimeric(1000000, 0.75, 0.5, ShapeFunction::constant());
  m.epsilon_override = 0.0;
  auto z = i_sums(m, 1.0);
  CHECK(z.i1 == doctest::Approx(0.0));
  CHECK(z.i2 == doctest::Approx(0.0));

  m.epsilon_override.reset();
  auto rep = i_sums(m, 1.0);
  // eps/kappa = n^{-1/4} < 1: indicator empty for I1, full for I2:
  // i2 = n^{1-2beta+r} - n^{1-2beta} = 1 - n^{-1/2}
  CHECK(rep.i1 == doctest::Approx(0.0));
  CHECK(rep.i2 == doctest::Approx(0.999).epsilon(1e-12));
  CHECK_THROWS_AS(i_sums(m, 0.0), std::invalid_argument);
}

TEST_CASE("powerlaw boundary I1 matches the closed form") {
  // a = 1/2 on its boundary r = 2 beta - 1: I1 -> min(n^{1-beta}, (x/(1-a))^{1-1/a})
  const double beta = 0.75, a = 0.5;
  auto m = make_chimeric(1000000, beta, 2.0 * beta - 1.0, ShapeFunction::power_law(a));
  for (double x : {0.25, 1.0, 4.0}) {
    auto rep = i_sums(m, x);
    double closed = std::min(std::pow(1e6, 1.0 - beta), std::pow(x / (1.0 - a), 1.0 - 1.0 / a));
    CHECK(rep.i1 == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("i_sums: closed forms match the crossing-scan quadrature path") {
  // Attaching a zero perturbation forces the quadrature route; the closed
  // forms must agree to 1e-6 relative.
  auto zero = Perturbation::tabulated({0.0, 0.5, 1.0}, {0.0, 0.0, 0.0});
  std::vector<DetectionModel> models = {
      make_chimeric(100000, 0.7, 0.6, ShapeFunction::constant()),
      make_chimeric(100000, 0.7, 0.4, ShapeFunction::power_law(0.35)),
      make_chimeric(100000, 0.75, 0.5, ShapeFunction::power_law(0.5)),
      make_chimeric(100000, 0.8, 0.7, ShapeFunction::linear2x()),
  };
  for (const auto& m : models) {
    DetectionModel mq = m;
    std::get<ChimericSignal>(mq.signal).perturbation = zero;
    for (double x : {0.5, 1.0, 2.0}) {
      auto exact = i_sums(m, x);
      auto quad = i_sums(mq, x);
      CAPTURE(m.label());
      CAPTURE(x);
      CHECK(exact.i1 ==
            doctest::Approx(quad.i1).epsilon(1e-6).scale(std::max(1.0, std::fabs(quad.i1))));
      CHECK(exact.i2 ==
            doctest::Approx(quad.i2).epsilon(1e-6).scale(std::max(1.0, std::fabs(quad.i2))));
    }
  }
}

TEST_CASE("i_sums match the Riemann oracle on smooth families") {
  std::vector<DetectionModel> models = {
      make_chimeric(100000, 0.7, 0.6, ShapeFunction::constant()),
      make_chimeric(100000, 0.8, 0.7, ShapeFunction::linear2x()),
      make_normal(100000, 0.6, 0.1, 1.0),
      make_normal(100000, 0.8, 0.6, 2.0),
      make_normal(100000, 0.7, 0.3, 0.8),
  };
  for (const auto& m : models) {
    for (double x : {0.5, 1.0, 2.0}) {
      auto exact = i_sums(m, x);
      auto brute = brute_i_sums(m, x);
      CAPTURE(m.label());
      CAPTURE(x);
      CHECK(exact.i1 ==
            doctest::Approx(brute.i1).epsilon(1e-4).scale(std::max(1.0, std::fabs(brute.i1))));
      CHECK(exact.i2 ==
            doctest::Approx(brute.i2).epsilon(1e-4).scale(std::max(1.0, std::fabs(brute.i2))));
    }
  }
}

TEST_CASE("i_sums monotonicity in the threshold") {
  auto m = make_chimeric(100000, 0.7, 0.55, ShapeFunction::power_law(0.3));
  auto mn = make_normal(100000, 0.7, 0.3, 1.2);
  for (const auto& model : {m, mn}) {
    double prev_i1 = std::numeric_limits<double>::infinity();
    double prev_i2c = -std::numeric_limits<double>::infinity();
    const double neps2 = static_cast<double>(model.n) * model.epsilon_raw() * model.epsilon_raw();
    for (double x : {0.1, 0.3, 1.0, 3.0, 10.0}) {
      auto rep = i_sums(model, x);
      CHECK(rep.i1 <= prev_i1 + 1e-9);
      CHECK(rep.i2 + neps2 >= prev_i2c - 1e-9);
      prev_i1 = rep.i1;
      prev_i2c = rep.i2 + neps2;
    }
  }
}

TEST_CASE("hellinger sum and its sandwich bounds") {
  auto m = make_chimeric(10000, 1.0, 0.75, ShapeFunction::constant());
  m.epsilon_override = 0.0;
  CHECK(hellinger_sum(m) == doctest::Approx(0.0));

  // 20 random models: 0.5 n eps^2 TV^2 <= D_n <= n eps TV
  Stream s(13);
  for (int trial = 0; trial < 20; ++trial) {
    DetectionModel model;
    if (trial % 2 == 0) {
      double beta = 0.55 + 0.4 * s.next_uniform();
      double r = 0.1 + 1.2 * s.next_uniform();
      ShapeFunction h = (trial % 4 == 0) ? ShapeFunction::power_law(0.45 * s.next_uniform())
                                         : ShapeFunction::linear2x();
      model = make_chimeric(10000, beta, r, h);
    } else {
      double beta = 0.55 + 0.4 * s.next_uniform();
      double r = 0.05 + 0.8 * s.next_uniform();
      double s0 = 0.5 + 2.0 * s.next_uniform();
      model = make_normal(10000, beta, r, s0);
    }
    const double n = static_cast<double>(model.n);
    const double eps = model.epsilon();
    const double tv = total_variation_p_mu(model);
    const double dn = hellinger_sum(model);
    CAPTURE(model.label());
    CHECK(dn >= 0.5 * n * eps * eps * tv * tv - 1e-9);
    CHECK(dn <= n * eps * tv + 1e-9);
  }
}

TEST_CASE("hellinger with vanishing support width") {
  // h == 1, kappa -> 0 at fixed n: TV -> 1 so D_n ∈ [n eps^2/2, n eps]
  for (double r : {0.75, 1.5}) {  // kappa = 1e-3, 1e-6 at n = 1e4
    auto m = make_chimeric(10000, 1.0, r, ShapeFunction::constant());
    double kap = m.kappa();
    CHECK(total_variation_p_mu(m) == doctest::Approx(1.0 - kap).epsilon(1e-8));
    double dn = hellinger_sum(m);
    const double n = 1e4, eps = m.epsilon();
    CHECK(dn >= 0.5 * n * eps * eps * (1 - kap) * (1 - kap) - 1e-12);
    CHECK(dn <= n * eps * (1 - kap) + 1e-12);
  }
}

TEST_CASE("lemma-style upper bound D_n <= (1/2 + eps) I1 + I2 at tau = 1") {
  Stream s(29);
  for (int trial = 0; trial < 50; ++trial) {
    DetectionModel model;
    if (trial % 2 == 0) {
      model = make_chimeric(10000, 0.55 + 0.4 * s.next_uniform(),
                            0.1 + 1.0 * s.next_uniform(),
                            ShapeFunction::power_law(0.4 * s.next_uniform()));
    } else {
      model = make_normal(10000, 0.55 + 0.4 * s.next_uniform(),
                          0.05 + 0.7 * s.next_uniform(), 0.6 + 1.8 * s.next_uniform());
    }
    auto rep = i_sums(model, 1.0);
    double dn = hellinger_sum(model);
    CAPTURE(model.label());
    CHECK(dn <= (0.5 + model.epsilon()) * rep.i1 + rep.i2 + 1e-9);
  }
}

TEST_CASE("hn_v closed cases") {
  auto m = make_chimeric(100000, 0.7, 0.6, ShapeFunction::constant());
  m.epsilon_override = 0.0;
  CHECK(hn_v(m, 0.25) == doctest::Approx(0.0));
  m.epsilon_override.reset();
  // v = n^-r: H = n^{1/2 - beta + r/2}(1 - v) + eps sqrt(n v)
  double v = std::pow(1e5, -0.6);
  double expected = std::fabs(1e5 * m.epsilon() * (1.0 - v)) / std::sqrt(1e5 * v) +
                    std::fabs(1e5 * m.epsilon() * v) / std::sqrt(1e5 * v);
  CHECK(hn_v(m, v) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(hn_v(m, v) == doctest::Approx(std::pow(1e5, 0.1)).epsilon(0.01));
  CHECK_THROWS_AS(hn_v(m, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(hn_v(m, 0.0), std::invalid_argument);

  // normal on the p-scale: theta -> 0 makes mu(0,v] = v, first term vanishes
  auto mn = make_normal(100000, 0.75, 1e-30, 1.0);
  CHECK(hn_v(mn, 0.25) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("boundary formulas") {
  CHECK(boundary_chimeric(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(boundary_chimeric(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(boundary_chimeric(0.5 + 1e-9) == doctest::Approx(2e-9).epsilon(1e-6));
  CHECK_THROWS_AS(boundary_chimeric(0.5), std::invalid_argument);

  CHECK(boundary_powerlaw(0.7, 0.5) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(boundary_powerlaw(0.6, 0.7) == doctest::Approx(0.0));
  CHECK(boundary_powerlaw(0.7, 0.7) == doctest::Approx(0.0));
  CHECK_THROWS_AS(boundary_powerlaw(0.7, 0.4), std::invalid_argument);

  CHECK(boundary_normal_sparse(0.6, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(log_exponent_E(0.6, 1.0) == doctest::Approx(0.0));
  CHECK(boundary_normal_sparse(0.9, 1.0) ==
        doctest::Approx(0.467544467966324).epsilon(1e-12));
  CHECK(log_exponent_E(0.9, 1.0) == doctest::Approx(0.341886116991581).epsilon(1e-12));
  CHECK(boundary_normal_sparse(0.6, 2.0) == doctest::Approx(0.0));
  CHECK(boundary_normal_sparse(0.9, 2.0) ==
        doctest::Approx(std::pow(1.0 - 2.0 * std::sqrt(0.1), 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(boundary_normal_sparse(0.4, 1.0), std::invalid_argument);

  CHECK(boundary_normal_dense(0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(boundary_normal_dense(0.1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(boundary_normal_dense(0.499999999) == doctest::Approx(1e-9).epsilon(1e-3));
  CHECK_THROWS_AS(boundary_normal_dense(0.6), std::invalid_argument);
}

TEST_CASE("classifier: certified chimeric points") {
  auto below = make_chimeric(1000, 0.7, 0.2, ShapeFunction::constant());
  CHECK(classify_region(below).label == Region::Undetectable);
  auto above = make_chimeric(1000, 0.7, 0.6, ShapeFunction::constant());
  CHECK(classify_region(above).label == Region::CompletelyDetectable);
  auto on = make_chimeric(1000, 0.7, 0.4, ShapeFunction::constant());
  CHECK(classify_region(on).label == Region::Detectable);
  CHECK(!classify_region(on).evidence.grid.empty());
}

TEST_CASE("classifier agrees with analytic boundaries away from them") {
  // Grid points sit where the I-sum trend is visible on the finite n-grid;
  // very small exponent gaps (e.g. beta near 1/2 with r near 0) need n far
  // beyond 1e7 before the asymptotic slope emerges.
  for (double beta : {0.6, 0.7, 0.8, 0.9, 0.95}) {
    double rho = boundary_chimeric(beta);
    for (double r : {0.1, 0.45, 0.8, 1.15}) {
      if (std::fabs(r - rho) <= 0.02) continue;
      auto m = make_chimeric(1000, beta, r, ShapeFunction::constant());
      auto lab = classify_region(m).label;
      CAPTURE(beta);
      CAPTURE(r);
      CHECK(lab == (r > rho ? Region::CompletelyDetectable : Region::Undetectable));
    }
  }
  // normal family, sigma0 = 1
  for (double beta : {0.6, 0.7, 0.8, 0.85, 0.9}) {
    double rho = boundary_normal_sparse(beta, 1.0);
    for (double r : {0.05, 0.3, 0.65, 0.9}) {
      if (std::fabs(r - rho) <= 0.02) continue;
      auto m = make_normal(1000, beta, r, 1.0);
      auto lab = classify_region(m).label;
      CAPTURE(beta);
      CAPTURE(r);
      CHECK(lab == (r > rho ? Region::CompletelyDetectable : Region::Undetectable));
    }
  }
}

TEST_CASE("classifier cross-checks other thresholds") {
  auto m = make_chimeric(1000, 0.7, 0.6, ShapeFunction::constant());
  auto res = classify_region(m);
  REQUIRE(res.evidence.cross_tau.size() == 2);
  for (auto& [tau, label] : res.evidence.cross_tau) CHECK(label == res.label);
}
