#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sigdetect/limits.hpp"
#include "sigdetect/montecarlo.hpp"
#include "sigdetect/quadrature.hpp"

using namespace sigdetect;

namespace {
// E exp(X) for an infinitely divisible law: exp(gamma + sigma^2/2 +
// int (e^x - 1 - x/(1+x^2)) deta). The contiguity identity demands this
// equals exp(-mass_at_inf) on the null side.
double exp_moment_identity(const LevyTriple& t, double floor = 1e-8) {
  double integral = 0.0;
  if (!t.jumps.empty())
    integral = t.jumps.integrate(
        [](double x) { return std::exp(x) - 1.0 - x / (1.0 + x * x); }, floor);
  return std::exp(t.gamma + 0.5 * t.sigma2 + integral);
}

std::complex<double> empirical_cf(const LevyTriple& t, double tval, int draws,
                                  std::uint64_t seed) {
  LimitSampler sampler(t);
  Stream root(seed);
  std::complex<double> acc{0.0, 0.0};
  for (int i = 0; i < draws; ++i) {
    Stream s = root.substream(0, static_cast<std::uint64_t>(i));
    ExtReal x = sampler.draw(s);
    REQUIRE(x.is_finite());
    acc += std::complex<double>(std::cos(tval * x.value()), std::sin(tval * x.value()));
  }
  return acc / static_cast<double>(draws);
}
}  // namespace

TEST_CASE("gaussian pair") {
  auto zero = gaussian_pair(0.0);
  CHECK(zero.null_side.gamma == 0.0);
  CHECK(zero.null_side.sigma2 == 0.0);
  CHECK(zero.null_side.jumps.empty());
  auto pair = gaussian_pair(1.0);
  CHECK(pair.null_side.gamma == doctest::Approx(-0.5));
  CHECK(pair.alt_side.gamma == doctest::Approx(0.5));
  CHECK(pair.alt_side.sigma2 == doctest::Approx(1.0));
  CHECK(pair.alt_side.gamma - pair.null_side.gamma == doctest::Approx(1.0));
  CHECK_THROWS_AS(gaussian_pair(-0.1), std::invalid_argument);
}

TEST_CASE("chimeric boundary Gaussian limits") {
  CHECK(triple_chimeric_boundary(1.0, ShapeFunction::constant()).null_side.sigma2 ==
        doctest::Approx(1.0));
  double l2_linear = integrate([](double x) { return 4.0 * x * x; }, 0.0, 1.0);
  CHECK(triple_chimeric_boundary(1.0, ShapeFunction::linear2x()).null_side.sigma2 ==
        doctest::Approx(l2_linear).epsilon(1e-12));
  CHECK(triple_chimeric_boundary(1.0, ShapeFunction::power_law(0.25)).null_side.sigma2 ==
        doctest::Approx(1.125).epsilon(1e-12));
  CHECK_THROWS_AS(triple_chimeric_boundary(1.0, ShapeFunction::power_law(0.5)),
                  std::invalid_argument);
}

TEST_CASE("powerlaw boundary triple: density and M-tail identity") {
  auto pair = triple_powerlaw_boundary(0.5);
  REQUIRE(pair.null_side.jumps.density.has_value());
  const auto& pdf = pair.null_side.jumps.density->pdf;
  for (double x : {0.3, 1.0, 2.5})
    CHECK(pdf(x) ==
          doctest::Approx(0.5 * std::exp(x) * std::pow(std::expm1(x), -3.0)).epsilon(1e-13));
  // int_(x,inf) (e^y - 1) deta1 = M(x,inf) = ((e^x-1)/(1-a))^{1-1/a}
  for (double x : {0.5, 1.0}) {
    double got = pair.null_side.jumps.integrate(
        [](double y) { return std::expm1(y); }, x);
    double want = std::pow(std::expm1(x) / 0.5, -1.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
  double tail = pair.null_side.jumps.integrate([](double y) { return std::expm1(y); }, 0.01);
  CHECK(std::isfinite(tail));
  CHECK(tail == doctest::Approx(0.5 / std::expm1(0.01)).epsilon(1e-7));
  REQUIRE(pair.alt_side.jumps.density.has_value());
  for (double x : {0.4, 1.7})
    CHECK(pair.alt_side.jumps.density->pdf(x) ==
          doctest::Approx(std::exp(x) * pdf(x)).epsilon(1e-12));
  CHECK_THROWS_AS(triple_powerlaw_boundary(0.4), std::invalid_argument);
}

TEST_CASE("normal quadratic triple") {
  auto pair = triple_normal_quadratic(0.9, 1.0);
  const double c2 = 0.537524704425736;
  const double c1 = 2.42390945853145;
  REQUIRE(pair.null_side.jumps.density.has_value());
  for (double x : {0.2, 1.0, 3.0})
    CHECK(pair.null_side.jumps.density->pdf(x) ==
          doctest::Approx(std::exp(x) * std::pow(std::expm1(x), c2 - 3.0) / c1)
              .epsilon(1e-10));
  double second = pair.null_side.jumps.integrate(
      [](double x) { return (x <= 1.0) ? x * x : 0.0; }, 0.0);
  CHECK(std::isfinite(second));
  CHECK(second > 0.0);
  CHECK_THROWS_AS(triple_normal_quadratic(0.6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(triple_normal_quadratic(0.6, 2.0), std::invalid_argument);
}

TEST_CASE("gamma_from_eta closed cases") {
  JumpMeasure none;
  auto [g1a, g2a] = gamma_from_eta(none, 1.0, 0.0);
  CHECK(g1a == doctest::Approx(-0.5));
  CHECK(g2a == doctest::Approx(0.5));
  auto [g1b, g2b] = gamma_from_eta(none, 0.0, 1.0);
  CHECK(g1b == doctest::Approx(-1.0));
  CHECK(g2b == doctest::Approx(-1.0));
  JumpMeasure atom;
  atom.atoms.push_back({std::log(2.0), 1.0});
  auto [g1c, g2c] = gamma_from_eta(atom, 0.0, 0.0);
  const double l2 = std::log(2.0);
  const double comp = l2 / (1.0 + l2 * l2);
  CHECK(g1c == doctest::Approx(-1.0 + comp).epsilon(1e-14));
  CHECK(g1c == doctest::Approx(-0.531800621807344).epsilon(1e-12));
  CHECK(g2c == doctest::Approx(g1c + comp).epsilon(1e-14));
}

TEST_CASE("contiguity identity E exp(xi_1) = exp(-mass) across shipped triples") {
  CHECK(exp_moment_identity(gaussian_pair(1.0).null_side) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exp_moment_identity(triple_powerlaw_boundary(0.75).null_side) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(exp_moment_identity(triple_normal_quadratic(0.9, 1.0).null_side) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(exp_moment_identity(triple_beta1(ShapeFunction::constant(), 1.0).null_side) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(exp_moment_identity(triple_beta1(ShapeFunction::linear2x(), 1.0).null_side) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(exp_moment_identity(triple_beta1(ShapeFunction::constant(), 2.0).null_side) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("eta2/eta1 = e^x pointwise") {
  auto pair = triple_powerlaw_boundary(0.6);
  const auto& d1 = pair.null_side.jumps.density->pdf;
  const auto& d2 = pair.alt_side.jumps.density->pdf;
  for (int k = 0; k < 100; ++k) {
    double x = std::pow(10.0, -3.0 + 4.0 * k / 99.0);
    CHECK(d2(x) / d1(x) == doctest::Approx(std::exp(x)).epsilon(1e-10));
  }
}

TEST_CASE("beta=1 chimeric cases") {
  auto low = triple_beta1(ShapeFunction::constant(), 0.5);
  CHECK(low.null_side.jumps.empty());
  CHECK(low.null_side.gamma == 0.0);
  CHECK(low.alt_side.mass_at_inf == 0.0);

  auto high = triple_beta1(ShapeFunction::constant(), 2.0);
  CHECK(high.null_side.gamma == doctest::Approx(-1.0));
  CHECK(high.alt_side.mass_at_inf == doctest::Approx(1.0));
  Stream root(5);
  int inf_count = 0;
  const int draws = 100000;
  LimitSampler alt(high.alt_side);
  for (int i = 0; i < draws; ++i) {
    Stream s = root.substream(1, static_cast<std::uint64_t>(i));
    ExtReal x = alt.draw(s);
    if (x.is_pos_inf())
      ++inf_count;
    else
      CHECK(x.value() == doctest::Approx(-1.0));
  }
  CHECK(static_cast<double>(inf_count) / draws ==
        doctest::Approx(0.632120558828558).epsilon(0.008));

  auto mid = triple_beta1(ShapeFunction::constant(), 1.0);
  REQUIRE(mid.null_side.jumps.atoms.size() == 1);
  CHECK(mid.null_side.jumps.atoms[0].x == doctest::Approx(std::log(2.0)));
  CHECK(mid.null_side.jumps.atoms[0].weight == doctest::Approx(1.0));
  CHECK(mid.alt_side.jumps.atoms[0].weight == doctest::Approx(2.0));
  CHECK(mid.alt_side.mass_at_inf == 0.0);
}

TEST_CASE("beta=1 normal cases") {
  auto low = triple_normal_beta1(0.9);
  CHECK(low.null_side.jumps.empty());
  CHECK(low.null_side.gamma == 0.0);
  auto mid = triple_normal_beta1(1.0);
  CHECK(mid.null_side.gamma == doctest::Approx(-0.5));
  CHECK(mid.alt_side.mass_at_inf == doctest::Approx(0.5));
  Stream root(9);
  LimitSampler alt(mid.alt_side);
  int fin = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    Stream s = root.substream(1, static_cast<std::uint64_t>(i));
    ExtReal x = alt.draw(s);
    if (x.is_finite()) {
      CHECK(x.value() == doctest::Approx(-0.5));
      ++fin;
    }
  }
  CHECK(static_cast<double>(fin) / draws ==
        doctest::Approx(0.606530659712633).epsilon(0.008));
  auto high = triple_normal_beta1(1.5);
  CHECK(high.null_side.gamma == doctest::Approx(-1.0));
  CHECK(high.alt_side.mass_at_inf == doctest::Approx(1.0));
}

TEST_CASE("beta=1 power-law density truncates at log(2-a)") {
  auto pair = triple_beta1(ShapeFunction::power_law(0.5), 1.0);
  REQUIRE(pair.null_side.jumps.density.has_value());
  CHECK(pair.null_side.jumps.density->support_lo == doctest::Approx(std::log(1.5)));
  CHECK(pair.null_side.jumps.total_mass() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("beta=1 tabulated shape goes through the pushforward route") {
  auto h = ShapeFunction::tabulated({0.0, 0.5, 1.0}, {0.0, 2.0, 0.0});
  auto pair = triple_beta1(h, 1.0);
  REQUIRE(pair.null_side.jumps.pushforward.has_value());
  CHECK(pair.null_side.jumps.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
  double x = std::log(2.0);  // h > 1 on (1/4, 3/4)
  CHECK(pair.null_side.jumps.tail_mass(x) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(exp_moment_identity(pair.null_side) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("lebesgue shift") {
  auto base = gaussian_pair(0.0);
  auto same = lebesgue_shift(base, 0.0);
  CHECK(same.null_side.gamma == 0.0);
  CHECK(same.alt_side.mass_at_inf == 0.0);

  auto shifted = lebesgue_shift(base, 1.0);
  CHECK(shifted.null_side.gamma == doctest::Approx(-1.0));
  CHECK(shifted.alt_side.gamma == doctest::Approx(-1.0));
  CHECK(shifted.alt_side.mass_at_inf == doctest::Approx(1.0));

  auto full = lebesgue_shift(base, std::numeric_limits<double>::infinity());
  CHECK(full.fully_informative);
  Stream s(1);
  CHECK(sample_limit(full, Side::Null, s).is_neg_inf());
  CHECK(sample_limit(full, Side::Alt, s).is_pos_inf());
  CHECK_THROWS_AS(lebesgue_shift(base, -1.0), std::invalid_argument);
}

TEST_CASE("cf_eval closed cases") {
  LevyTriple gauss;
  gauss.sigma2 = 1.0;
  auto v = cf_eval(gauss, 1.0);
  CHECK(v.real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cf_eval(gauss, 0.0) == std::complex<double>(1.0, 0.0));

  LevyTriple atom;
  atom.jumps.atoms.push_back({std::log(2.0), 1.0});
  auto w = cf_eval(atom, 1.0);
  CHECK(w.real() == doctest::Approx(0.782381876554125).epsilon(1e-10));
  CHECK(w.imag() == doctest::Approx(0.134914926903285).epsilon(1e-10));
}

TEST_CASE("sampler matches the characteristic function") {
  struct Case {
    const char* name;
    LevyTriple triple;
  };
  std::vector<Case> cases;
  cases.push_back({"gaussian", gaussian_pair(1.0).null_side});
  cases.push_back({"powerlaw 0.5 null", triple_powerlaw_boundary(0.5).null_side});
  cases.push_back({"powerlaw 0.75 alt", triple_powerlaw_boundary(0.75).alt_side});
  cases.push_back({"normal quad null", triple_normal_quadratic(0.9, 1.0).null_side});
  cases.push_back({"beta1 const null", triple_beta1(ShapeFunction::constant(), 1.0).null_side});
  cases.push_back({"beta1 linear2x null", triple_beta1(ShapeFunction::linear2x(), 1.0).null_side});
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    LevyTriple t = c.triple;
    t.mass_at_inf = 0.0;  // compare the finite part only
    for (double tv : {0.5, 1.0, 2.0}) {
      auto emp = empirical_cf(t, tv, 100000, seed);
      auto ana = cf_eval(t, tv);
      CAPTURE(c.name);
      CAPTURE(tv);
      CHECK(std::abs(emp - ana) < 0.015);
    }
    ++seed;
  }
}

TEST_CASE("gaussian sampler mean") {
  auto pair = gaussian_pair(1.0);
  LimitSampler sampler(pair.null_side);
  Stream root(77);
  double sum = 0.0;
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) {
    Stream s = root.substream(0, static_cast<std::uint64_t>(i));
    sum += sampler.draw(s).value();
  }
  CHECK(std::fabs(sum / draws + 0.5) < 0.01);
}

TEST_CASE("contiguity by simulation on well-behaved triples") {
  for (auto& t : {gaussian_pair(1.0).null_side,
                  triple_beta1(ShapeFunction::constant(), 1.0).null_side}) {
    LimitSampler sampler(t);
    Stream root(55);
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      Stream s = root.substream(0, static_cast<std::uint64_t>(i));
      sum += std::exp(sampler.draw(s).value());
    }
    CHECK(std::fabs(sum / draws - 1.0) < 0.02);
  }
}

TEST_CASE("jump-budget cap raises the cutoff for infinite-activity measures") {
  auto t = triple_powerlaw_boundary(0.5).null_side;
  SamplerOptions opts;
  CHECK(effective_cutoff(t, opts) > opts.cutoff);
  LimitSampler sampler(t, opts);
  CHECK(sampler.lambda() <= opts.max_expected_jumps * 1.01);
  CHECK(sampler.cutoff() == doctest::Approx(effective_cutoff(t, opts)).epsilon(1e-10));
}

TEST_CASE("beta1 r=1 jump law matches the direct log(h(U)+1) law") {
  // smooth monotone h = 2x: jump density e^x/2 on (0, log 3), CDF (e^x - 1)/2
  auto pair = triple_beta1(ShapeFunction::linear2x(), 1.0);
  LimitSampler sampler(pair.null_side);
  Stream root(123);
  std::vector<double> draws(200000);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    Stream s = root.substream(0, i);
    draws[i] = sampler.draw_table_jump(s);
  }
  auto cdf = [](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= std::log(3.0)) return 1.0;
    return 0.5 * std::expm1(x);
  };
  CHECK(ecdf_and_ks(std::span<const double>(draws), cdf) < 0.01);
}

TEST_CASE("samplers are deterministic given the stream") {
  auto t = triple_normal_quadratic(0.9, 1.0).null_side;
  LimitSampler a(t), b(t);
  Stream s1(7), s2(7);
  for (int i = 0; i < 50; ++i) {
    ExtReal x = a.draw(s1), y = b.draw(s2);
    REQUIRE(x.is_finite() == y.is_finite());
    if (x.is_finite()) CHECK(x.value() == y.value());
  }
}
