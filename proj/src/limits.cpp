#include "sigdetect/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigdetect/quadrature.hpp"

namespace sigdetect {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Crossing scan for {u : map(u) > x} on (0,1); map is continuous.
double pushforward_tail(const JumpPushforward& p, double x) {
  const int panels = 2048;
  double meas = 0.0;
  auto above = [&](double u) { return p.map(u) > x; };
  for (int i = 0; i < panels; ++i) {
    double a = (i + 1e-9) / panels, b = (i + 1.0 - 1e-9) / panels;
    bool fa = above(a), fb = above(b);
    if (fa && fb) {
      meas += integrate([&](double u) { return p.u_density(u); }, a, b, QuadOptions{});
    } else if (fa != fb) {
      double lo = a, hi = b;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (above(mid) == fa)
          lo = mid;
        else
          hi = mid;
      }
      double cut = 0.5 * (lo + hi);
      if (fa)
        meas += integrate([&](double u) { return p.u_density(u); }, a, cut, QuadOptions{});
      else
        meas += integrate([&](double u) { return p.u_density(u); }, cut, b, QuadOptions{});
    }
  }
  return meas;
}
}  // namespace

double JumpMeasure::integrate(const std::function<double(double)>& f, double lo,
                              double max_panel) const {
  double total = 0.0;
  for (const auto& a : atoms)
    if (a.x > lo) total += a.weight * f(a.x);
  if (density) {
    double a = std::max(lo, density->support_lo);
    if (a < density->tail_cut) {
      auto g = [&](double x) { return f(x) * density->pdf(x); };
      total += sigdetect::integrate(g, a, density->tail_cut,
                                    QuadOptions{1e-12, 1e-10, max_panel, 6000});
    }
  }
  if (pushforward) {
    auto g = [&](double u) {
      double x = pushforward->map(u);
      return (x > lo) ? f(x) * pushforward->u_density(u) : 0.0;
    };
    total += sigdetect::integrate(g, 0.0, 1.0, QuadOptions{1e-12, 1e-10, 1.0 / 512, 6000});
  }
  return total;
}

std::complex<double> JumpMeasure::integrate_complex(
    const std::function<std::complex<double>(double)>& f, double lo, double max_panel) const {
  auto re = integrate([&](double x) { return f(x).real(); }, lo, max_panel);
  auto im = integrate([&](double x) { return f(x).imag(); }, lo, max_panel);
  return {re, im};
}

double JumpMeasure::tail_mass(double x) const {
  double total = 0.0;
  for (const auto& a : atoms)
    if (a.x > x) total += a.weight;
  if (density) {
    double a = std::max(x, density->support_lo);
    if (a < density->tail_cut)
      total += sigdetect::integrate(density->pdf, a, density->tail_cut,
                                    QuadOptions{1e-12, 1e-10, 0.0, 6000});
  }
  if (pushforward) total += pushforward_tail(*pushforward, x);
  return total;
}

std::pair<double, double> gamma_from_eta(const JumpMeasure& eta, double sigma2,
                                         double mass_at_inf, double floor) {
  if (mass_at_inf < 0.0) throw std::invalid_argument("gamma_from_eta: negative mass at infinity");
  const double log_a = -mass_at_inf;
  double i1 = 0.0, i2 = 0.0;
  if (!eta.empty()) {
    i1 = eta.integrate(
        [](double x) { return 1.0 - std::exp(x) + x / (1.0 + x * x); }, floor);
    i2 = eta.integrate(
        [](double x) { return (std::exp(x) - 1.0) * x / (1.0 + x * x); }, floor);
    if (!std::isfinite(i1) || !std::isfinite(i2))
      throw std::invalid_argument("gamma_from_eta: divergent drift integrals");
  }
  const double g1 = log_a - 0.5 * sigma2 + i1;
  const double g2 = g1 + sigma2 + i2;
  return {g1, g2};
}

JumpMeasure tilt_jumps(const JumpMeasure& eta1) {
  JumpMeasure out;
  for (const auto& a : eta1.atoms) out.atoms.push_back({a.x, a.weight * std::exp(a.x)});
  if (eta1.density) {
    auto base = eta1.density->pdf;
    out.density = JumpDensity{
        [base](double x) { return std::exp(x) * base(x); },
        eta1.density->support_lo, eta1.density->tail_cut};
  }
  if (eta1.pushforward) {
    // weighted pushforward with u-density e^{m(u)} * base(u)
    auto m = eta1.pushforward->map;
    auto base = eta1.pushforward->u_density;
    JumpPushforward p;
    p.map = m;
    p.u_density = [m, base](double u) { return std::exp(m(u)) * base(u); };
    double w = sigdetect::integrate(p.u_density, 0.0, 1.0, QuadOptions{1e-12, 1e-12, 0.0, 4000});
    p.weight = w;
    // Rejection against base * sup(e^m); the shipped maps are bounded.
    double sup = 0.0;
    for (int i = 1; i < 4096; ++i)
      sup = std::max(sup, std::exp(m(static_cast<double>(i) / 4096)));
    auto draw_base = eta1.pushforward->draw_u;
    p.draw_u = [m, sup, draw_base](Stream& s) {
      for (;;) {
        double u = draw_base(s);
        if (s.next_uniform() * sup <= std::exp(m(u))) return u;
      }
    };
    out.pushforward = std::move(p);
  }
  return out;
}

LimitPair gaussian_pair(double sigma2) {
  if (sigma2 < 0.0) throw std::invalid_argument("gaussian_pair: sigma^2 must be >= 0");
  LimitPair pair;
  pair.null_side.gamma = -0.5 * sigma2;
  pair.null_side.sigma2 = sigma2;
  pair.alt_side.gamma = 0.5 * sigma2;
  pair.alt_side.sigma2 = sigma2;
  return pair;
}

LimitPair triple_chimeric_boundary(double K, const ShapeFunction& h) {
  if (!(K > 0.0 && std::isfinite(K)))
    throw std::invalid_argument("triple_chimeric_boundary: K must lie in (0, inf)");
  if (!h.l2_finite())
    throw std::invalid_argument("triple_chimeric_boundary: ∫h^2 is infinite (power-law a >= 1/2)");
  return gaussian_pair(K * h.l2());
}

namespace {
LimitPair pair_from_eta1(JumpMeasure eta1, double mass_at_inf) {
  auto [g1, g2] = gamma_from_eta(eta1, 0.0, mass_at_inf);
  LimitPair pair;
  pair.alt_side.jumps = tilt_jumps(eta1);
  pair.null_side.jumps = std::move(eta1);
  pair.null_side.gamma = g1;
  pair.alt_side.gamma = g2;
  pair.alt_side.mass_at_inf = mass_at_inf;
  return pair;
}
}  // namespace

LimitPair triple_powerlaw_boundary(double a) {
  if (!(a >= 0.5 && a < 1.0))
    throw std::invalid_argument("triple_powerlaw_boundary: a must lie in [1/2, 1)");
  const double C = std::pow(1.0 - a, 1.0 / a) / a;
  const double inv_a = 1.0 / a;
  JumpMeasure eta1;
  // e^x (e^x-1)^{-1/a-1} decays like e^{-x/a}; the e^x-tilted measure decays
  // like e^{-x(1/a-1)}, which sets the numerical tail cut.
  double cut = std::max(60.0, 40.0 / (inv_a - 1.0 + 1e-9));
  eta1.density = JumpDensity{
      [C, inv_a](double x) {
        return C * std::exp(x) * std::pow(std::expm1(x), -inv_a - 1.0);
      },
      0.0, cut};
  return pair_from_eta1(std::move(eta1), 0.0);
}

LimitPair triple_normal_quadratic(double beta, double sigma0) {
  const double s2 = sigma0 * sigma0;
  bool quad_case = (sigma0 < std::sqrt(2.0)) ? (beta > 1.0 - s2 / 4.0)
                                             : (beta > 1.0 - 1.0 / s2);
  if (!(beta > 0.5 && beta < 1.0) || !quad_case)
    throw std::invalid_argument(
        "triple_normal_quadratic: (beta, sigma0) must lie on the quadratic part (II)/(IV)");
  const double root = std::sqrt(1.0 - beta);
  const double c4 = sigma0 - root;
  const double c3 = sigma0 / c4 - root;
  const double c2 = (sigma0 - 2.0 * root) / c4;
  const double c1 = 2.0 * std::sqrt(3.14159265358979323846) * std::pow(sigma0, c3) * c4;
  JumpMeasure eta1;
  double cut = std::max(60.0, 40.0 / std::max(1e-9, 1.0 - c2));
  eta1.density = JumpDensity{
      [c1, c2](double x) {
        return std::exp(x) * std::pow(std::expm1(x), c2 - 3.0) / c1;
      },
      0.0, cut};
  return pair_from_eta1(std::move(eta1), 0.0);
}

LimitPair triple_beta1(const ShapeFunction& h, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("triple_beta1: r must be positive");
  if (r < 1.0) return LimitPair{};  // uninformative pair
  if (r > 1.0) return pair_from_eta1(JumpMeasure{}, 1.0);  // xi_1 == -1
  // r == 1: eta_1 is the image of lambda|(0,1) under u -> log(h(u)+1).
  JumpMeasure eta1;
  switch (h.kind()) {
    case ShapeKind::Constant:
      eta1.atoms.push_back({std::log(2.0), 1.0});
      break;
    case ShapeKind::PowerLaw: {
      const double a = h.power_exponent();
      if (a == 0.0) {
        eta1.atoms.push_back({std::log(2.0), 1.0});
        break;
      }
      const double C = std::pow(1.0 - a, 1.0 / a) / a;
      const double inv_a = 1.0 / a;
      double cut = std::max(60.0, 40.0 / std::max(1e-9, inv_a - 1.0));
      if (a >= 1.0) cut = 60.0;
      eta1.density = JumpDensity{
          [C, inv_a](double x) {
            return C * std::exp(x) * std::pow(std::expm1(x), -inv_a - 1.0);
          },
          std::log(2.0 - a), cut};
      break;
    }
    case ShapeKind::Linear2x:
      eta1.density = JumpDensity{[](double x) { return 0.5 * std::exp(x); }, 0.0,
                                 std::log(3.0)};
      break;
    case ShapeKind::Tabulated: {
      JumpPushforward p;
      ShapeFunction hc = h;
      p.map = [hc](double u) { return std::log(hc(u) + 1.0); };
      p.u_density = [](double) { return 1.0; };
      p.draw_u = [](Stream& s) { return s.next_uniform(); };
      p.weight = 1.0;
      eta1.pushforward = std::move(p);
      break;
    }
  }
  return pair_from_eta1(std::move(eta1), 0.0);
}

LimitPair triple_normal_beta1(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("triple_normal_beta1: r must be positive");
  if (r < 1.0) return LimitPair{};
  return pair_from_eta1(JumpMeasure{}, r > 1.0 ? 1.0 : 0.5);
}

LimitPair lebesgue_shift(const LimitPair& pair, double c) {
  if (c < 0.0) throw std::invalid_argument("lebesgue_shift: c must be >= 0");
  if (pair.fully_informative) return pair;
  if (std::isinf(c)) {
    LimitPair out;
    out.fully_informative = true;
    return out;
  }
  LimitPair out = pair;
  out.null_side.gamma -= c;
  out.alt_side.gamma -= c;
  out.alt_side.mass_at_inf += c;
  return out;
}

namespace {
struct SmallJumpMoments {
  double cutoff = 0.0;
  double lambda = 0.0;   // density mass above cutoff
  double variance = 0.0; // ∫_{floor}^{cutoff} x^2 dη
  double drift = 0.0;    // ∫_{floor}^{cutoff} x^3/(1+x^2) dη
  double comp = 0.0;     // ∫_{cutoff}^{inf} x/(1+x^2) dη (density part)
};

SmallJumpMoments density_moments(const JumpDensity& d, const SamplerOptions& opts) {
  SmallJumpMoments m;
  auto mass_above = [&](double c) {
    double a = std::max(c, d.support_lo);
    if (a >= d.tail_cut) return 0.0;
    return sigdetect::integrate(d.pdf, a, d.tail_cut, QuadOptions{1e-12, 1e-9, 0.0, 6000});
  };
  double cutoff = opts.cutoff;
  double lam = mass_above(cutoff);
  if (lam > opts.max_expected_jumps) {
    // raise the cutoff until the expected jump count fits the budget
    double lo = cutoff, hi = std::max(1.0, 2.0 * cutoff);
    while (mass_above(hi) > opts.max_expected_jumps) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
      double mid = std::sqrt(lo * hi);
      if (mass_above(mid) > opts.max_expected_jumps)
        lo = mid;
      else
        hi = mid;
    }
    cutoff = hi;
    lam = mass_above(cutoff);
  }
  m.cutoff = cutoff;
  m.lambda = lam;
  double a = std::max(opts.inner_floor, d.support_lo);
  if (a < cutoff) {
    m.variance = sigdetect::integrate([&](double x) { return x * x * d.pdf(x); }, a, cutoff,
                                      QuadOptions{1e-14, 1e-10, 0.0, 6000});
    m.drift = sigdetect::integrate(
        [&](double x) { return x * x * x / (1.0 + x * x) * d.pdf(x); }, a, cutoff,
        QuadOptions{1e-14, 1e-10, 0.0, 6000});
  }
  double b = std::max(cutoff, d.support_lo);
  if (b < d.tail_cut)
    m.comp = sigdetect::integrate(
        [&](double x) { return x / (1.0 + x * x) * d.pdf(x); }, b, d.tail_cut,
        QuadOptions{1e-14, 1e-10, 0.0, 6000});
  return m;
}
}  // namespace

double effective_cutoff(const LevyTriple& t, const SamplerOptions& opts) {
  if (!t.jumps.density) return opts.cutoff;
  return density_moments(*t.jumps.density, opts).cutoff;
}

std::complex<double> cf_eval(const LevyTriple& t, double tval, const SamplerOptions& opts) {
  if (tval == 0.0) return {1.0, 0.0};
  const std::complex<double> i(0.0, 1.0);
  std::complex<double> expo = i * t.gamma * tval - 0.5 * t.sigma2 * tval * tval;
  auto lk = [&](double x) {
    return std::exp(i * tval * x) - 1.0 - i * tval * x / (1.0 + x * x);
  };
  // atoms and pushforward: exact
  for (const auto& a : t.jumps.atoms) expo += a.weight * lk(a.x);
  if (t.jumps.pushforward) {
    const auto& p = *t.jumps.pushforward;
    auto re = sigdetect::integrate(
        [&](double u) { return lk(p.map(u)).real() * p.u_density(u); }, 0.0, 1.0,
        QuadOptions{1e-12, 1e-10, 1.0 / 512, 6000});
    auto im = sigdetect::integrate(
        [&](double u) { return lk(p.map(u)).imag() * p.u_density(u); }, 0.0, 1.0,
        QuadOptions{1e-12, 1e-10, 1.0 / 512, 6000});
    expo += std::complex<double>(re, im);
  }
  // density: small jumps below the effective cutoff are absorbed as
  // it c3 - v t^2 / 2, the rest integrated with oscillation-bounded panels.
  if (t.jumps.density) {
    auto m = density_moments(*t.jumps.density, opts);
    expo += i * tval * m.drift - 0.5 * m.variance * tval * tval;
    const double panel = std::min(0.5, 0.25 * 3.14159265358979323846 / std::fabs(tval));
    double a = std::max(m.cutoff, t.jumps.density->support_lo);
    if (a < t.jumps.density->tail_cut) {
      auto re = sigdetect::integrate(
          [&](double x) { return lk(x).real() * t.jumps.density->pdf(x); }, a,
          t.jumps.density->tail_cut, QuadOptions{1e-12, 1e-10, panel, 20000});
      auto im = sigdetect::integrate(
          [&](double x) { return lk(x).imag() * t.jumps.density->pdf(x); }, a,
          t.jumps.density->tail_cut, QuadOptions{1e-12, 1e-10, panel, 20000});
      expo += std::complex<double>(re, im);
    }
  }
  return std::exp(expo);
}

LimitSampler::LimitSampler(const LevyTriple& t, const SamplerOptions& opts) {
  p_inf_ = -std::expm1(-t.mass_at_inf);
  drift_ = t.gamma;
  double variance = t.sigma2;
  atoms_ = t.jumps.atoms;
  for (const auto& a : atoms_) drift_ -= a.weight * a.x / (1.0 + a.x * a.x);
  if (t.jumps.pushforward) {
    push_ = t.jumps.pushforward;
    push_weight_ = push_->weight;
    drift_ -= sigdetect::integrate(
        [&](double u) {
          double x = push_->map(u);
          return x / (1.0 + x * x) * push_->u_density(u);
        },
        0.0, 1.0, QuadOptions{1e-12, 1e-10, 1.0 / 512, 6000});
  }
  if (t.jumps.density) {
    auto m = density_moments(*t.jumps.density, opts);
    cutoff_ = m.cutoff;
    lambda_ = m.lambda;
    variance += m.variance;
    drift_ += m.drift - m.comp;
    // jump table: log-spaced edges, exact cell masses, trapezoid within cells
    const double lo = std::max(m.cutoff, t.jumps.density->support_lo);
    const double hi = t.jumps.density->tail_cut;
    const int cells = opts.table_cells;
    if (lambda_ > 0.0 && lo < hi) {
      cell_x_.resize(cells + 1);
      cell_pdf_.resize(cells + 1);
      cell_cum_.assign(cells + 1, 0.0);
      const double lr = std::log(hi / lo);
      for (int k = 0; k <= cells; ++k) {
        cell_x_[k] = lo * std::exp(lr * k / cells);
        cell_pdf_[k] = t.jumps.density->pdf(cell_x_[k]);
      }
      for (int k = 1; k <= cells; ++k) {
        double mass = sigdetect::integrate(t.jumps.density->pdf, cell_x_[k - 1], cell_x_[k],
                                           QuadOptions{1e-13, 1e-8, 0.0, 50});
        cell_cum_[k] = cell_cum_[k - 1] + mass;
      }
      const double total = cell_cum_.back();
      for (auto& c : cell_cum_) c /= total;
      lambda_ = total;  // use the table's own normalization for consistency
    }
  } else {
    cutoff_ = opts.cutoff;
  }
  gauss_sd_ = std::sqrt(variance);
}

double LimitSampler::draw_table_jump(Stream& stream) const {
  double u = stream.next_uniform();
  auto it = std::upper_bound(cell_cum_.begin(), cell_cum_.end(), u);
  std::size_t k = static_cast<std::size_t>(it - cell_cum_.begin());
  if (k == 0) k = 1;
  if (k >= cell_cum_.size()) k = cell_cum_.size() - 1;
  const double w = cell_x_[k] - cell_x_[k - 1];
  const double frac =
      (u - cell_cum_[k - 1]) / std::max(1e-300, cell_cum_[k] - cell_cum_[k - 1]);
  // invert the trapezoid CDF within the cell:
  // mass(tau) = p0 tau + s tau^2/2, total (p0+p1)/2, s = p1 - p0
  const double p0 = cell_pdf_[k - 1], p1 = cell_pdf_[k];
  const double s = p1 - p0;
  double tfrac;
  if (std::fabs(s) < 1e-12 * std::max(p0, p1)) {
    tfrac = frac;
  } else {
    const double target = frac * 0.5 * (p0 + p1);
    tfrac = (std::sqrt(std::max(0.0, p0 * p0 + 2.0 * s * target)) - p0) / s;
    tfrac = std::clamp(tfrac, 0.0, 1.0);
  }
  return cell_x_[k - 1] + w * tfrac;
}

ExtReal LimitSampler::draw(Stream& stream) const {
  if (p_inf_ > 0.0 && stream.next_uniform() < p_inf_) return ExtReal::pos_inf();
  double x = drift_;
  if (gauss_sd_ > 0.0) x += gauss_sd_ * stream.next_normal();
  for (const auto& a : atoms_) {
    std::uint64_t cnt = stream.next_poisson(a.weight);
    x += static_cast<double>(cnt) * a.x;
  }
  if (push_) {
    std::uint64_t cnt = stream.next_poisson(push_weight_);
    for (std::uint64_t j = 0; j < cnt; ++j) x += push_->map(push_->draw_u(stream));
  }
  if (lambda_ > 0.0) {
    std::uint64_t cnt = stream.next_poisson(lambda_);
    for (std::uint64_t j = 0; j < cnt; ++j) x += draw_table_jump(stream);
  }
  return ExtReal::finite(x);
}

ExtReal sample_limit(const LimitPair& pair, Side side, Stream& stream,
                     const SamplerOptions& opts) {
  if (pair.fully_informative)
    return side == Side::Null ? ExtReal::neg_inf() : ExtReal::pos_inf();
  LimitSampler sampler(side == Side::Null ? pair.null_side : pair.alt_side, opts);
  return sampler.draw(stream);
}

}  // namespace sigdetect
