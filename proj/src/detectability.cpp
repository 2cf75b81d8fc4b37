#include "sigdetect/detectability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sigdetect/quadrature.hpp"
#include "sigdetect/special.hpp"

namespace sigdetect {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Crossing points of eps*f(u) = x for the (possibly perturbed) chimeric signal
// density f on (0,1), located by panel scan plus bisection.
std::vector<double> chimeric_crossings(const DetectionModel& m, double x) {
  const double eps = m.epsilon_raw();
  auto g = [&](double u) { return eps * m.signal_density_ratio(u) - x; };
  std::vector<double> cuts;
  const double kap = m.kappa();
  auto scan = [&](double lo, double hi, int panels) {
    double prev = g(lo + (hi - lo) * 1e-12);
    for (int i = 1; i <= panels; ++i) {
      double u = lo + (hi - lo) * i / panels;
      double cur = g(std::min(u, hi - (hi - lo) * 1e-12));
      if ((prev > 0.0) != (cur > 0.0)) {
        double a = lo + (hi - lo) * (i - 1) / panels, b = u;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (a + b);
          if ((g(mid) > 0.0) == (prev > 0.0))
            a = mid;
          else
            b = mid;
        }
        cuts.push_back(0.5 * (a + b));
      }
      prev = cur;
    }
  };
  scan(0.0, kap, 2048);
  if (kap < 1.0) scan(kap, 1.0, 2048);
  return cuts;
}

double chimeric_piecewise_integral(const DetectionModel& m, double x,
                                   const std::function<double(double)>& f, bool above) {
  const double eps = m.epsilon_raw();
  std::vector<double> cuts = chimeric_crossings(m, x);
  const double kap = m.kappa();
  cuts.push_back(0.0);
  cuts.push_back(kap);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    if (hi - lo < 1e-15) continue;
    double mid = 0.5 * (lo + hi);
    bool seg_above = eps * m.signal_density_ratio(mid) > x;
    if (seg_above != above) continue;
    total += integrate(f, lo, hi, QuadOptions{1e-13, 1e-10, 0.0, 4000});
  }
  return total;
}
}  // namespace

std::string to_string(Region r) {
  switch (r) {
    case Region::Undetectable: return "undetectable";
    case Region::Detectable: return "detectable";
    case Region::CompletelyDetectable: return "completely-detectable";
  }
  return "?";
}

ISumReport i_sums(const DetectionModel& m, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("i_sums: threshold x must be positive");
  if (m.truncation) throw std::logic_error("i_sums: untruncated models only");
  const double n = static_cast<double>(m.n);
  const double eps = m.epsilon_raw();
  ISumReport rep;
  rep.x = x;
  rep.n = m.n;
  if (m.is_chimeric()) {
    const double kap = m.kappa();
    if (!m.chimeric().perturbation) {
      // eps/kap h(v) > x  <=>  h(v) > x kap / eps
      auto ls = m.chimeric().h.superlevel(x * kap / eps);
      rep.i1 = n * eps * ls.h_mass;
      rep.i2 = n * eps * eps / kap * ls.h2_sublevel - n * eps * eps;
    } else {
      auto f = [&](double u) { return m.signal_density_ratio(u); };
      auto f2 = [&](double u) { double v = m.signal_density_ratio(u); return v * v; };
      rep.i1 = n * eps * chimeric_piecewise_integral(m, x, f, true);
      rep.i2 = n * eps * eps * (chimeric_piecewise_integral(m, x, f2, false) - 1.0);
    }
    return rep;
  }
  // Normal family: the exceed region has closed-form mu-mass; the truncated
  // second moment is integrated over the complement.
  ExceedRegion reg = normal_exceed_region(m, x);
  rep.i1 = n * eps * reg.mu_probability(m);
  auto integrand = [&](double y) {
    double lr = m.signal_log_ratio(y);
    return std::exp(2.0 * lr - 0.5 * y * y) * 0.3989422804014326779;
  };
  // complement of the exceed region, clipped to a range where the integrand
  // has decayed away
  const double s0 = m.normal_shift().sigma0;
  const double ymax = std::max(15.0, m.theta() + 18.0 * s0);
  std::vector<std::pair<double, double>> comp;
  double prev = -kInf;
  for (auto& [a, b] : reg.intervals) {
    comp.push_back({prev, a});
    prev = b;
  }
  comp.push_back({prev, kInf});
  double second = 0.0;
  for (auto& [a, b] : comp) {
    double lo = std::max(a, -ymax), hi = std::min(b, ymax);
    if (hi <= lo) continue;
    second += integrate(integrand, lo, hi, QuadOptions{1e-14, 1e-10, 0.5, 4000});
  }
  rep.i2 = n * eps * eps * (second - 1.0);
  return rep;
}

double total_variation_p_mu(const DetectionModel& m) {
  // ||P - mu|| = 0.5 ∫ |dmu/dP - 1| dP
  if (m.is_chimeric()) {
    const double kap = m.kappa();
    auto f = [&](double u) { return std::fabs(m.signal_density_ratio(u) - 1.0); };
    double v = integrate(f, 0.0, kap, QuadOptions{1e-13, 1e-10, 0.0, 4000}) +
               integrate(f, kap, 1.0, QuadOptions{1e-13, 1e-10, 0.0, 4000});
    return 0.5 * v;
  }
  const double s0 = m.normal_shift().sigma0;
  const double ymax = std::max(15.0, m.theta() + 18.0 * s0);
  auto f = [&](double y) {
    const double lr = m.signal_log_ratio(y);
    // |ratio - 1| phi(y): for large ratios this is the mu-density itself,
    // evaluated in log space so the ratio alone cannot overflow.
    if (lr > 60.0) return std::exp(lr - 0.5 * y * y) * 0.3989422804014326779;
    return std::fabs(std::expm1(lr)) * norm_pdf(y);
  };
  return 0.5 * integrate(f, -ymax, ymax, QuadOptions{1e-14, 1e-10, 0.5, 6000});
}

double hellinger_sum(const DetectionModel& m) {
  const double n = static_cast<double>(m.n);
  const double eps = m.epsilon();
  // 0.5 (sqrt(1+w) - 1)^2 with w = eps (dmu/dP - 1), written to avoid
  // cancellation for small w.
  auto halfsq = [&](double w) {
    double s = std::sqrt(1.0 + w) + 1.0;
    return 0.5 * w * w / (s * s);
  };
  if (m.is_chimeric()) {
    const double kap = m.kappa();
    auto f = [&](double u) { return halfsq(eps * (m.signal_density_ratio(u) - 1.0)); };
    double d2 = integrate(f, 0.0, kap, QuadOptions{1e-16, 1e-9, 0.0, 8000});
    if (!m.chimeric().perturbation) {
      d2 += (1.0 - kap) * halfsq(-eps);
    } else {
      d2 += integrate(f, kap, 1.0, QuadOptions{1e-16, 1e-9, 0.0, 8000});
    }
    return n * d2;
  }
  const double s0 = m.normal_shift().sigma0;
  const double ymax = std::max(15.0, m.theta() + 18.0 * s0);
  const double leps = std::log(eps);
  auto f = [&](double y) {
    const double lr = m.signal_log_ratio(y);
    // (sqrt(1+w)-1)^2 ~ w for huge w = eps(ratio-1); fold phi(y) into the
    // exponent so nothing overflows on the far tail.
    if (leps + lr > 40.0 || lr > 600.0)
      return 0.5 * eps * std::exp(lr - 0.5 * y * y) * 0.3989422804014326779;
    double w = eps * std::expm1(lr);
    return halfsq(w) * norm_pdf(y);
  };
  return n * integrate(f, -ymax, ymax, QuadOptions{1e-18, 1e-9, 0.5, 8000});
}

double hn_v(const DetectionModel& m, double v) {
  if (!(v > 0.0 && v < 0.5)) throw std::invalid_argument("hn_v: v must lie in (0, 1/2)");
  const double n = static_cast<double>(m.n);
  const double eps = m.epsilon();
  double mu_low, mu_high;
  if (m.is_chimeric()) {
    const double kap = m.kappa();
    mu_low = m.chimeric().h.cdf(std::min(v / kap, 1.0));
    mu_high = 0.0;
    if (m.chimeric().perturbation) {
      const auto& pert = *m.chimeric().perturbation;
      mu_low += pert.integral(0.0, v);
      mu_high += pert.integral(1.0 - v, 1.0);
    }
  } else {
    const double s0 = m.normal_shift().sigma0;
    const double th = m.theta();
    const double q = norm_quantile(v);
    mu_low = 1.0 - norm_cdf((-q - th) / s0);
    mu_high = norm_cdf((q - th) / s0);
  }
  return (std::fabs(n * eps * (mu_low - v)) + std::fabs(n * eps * (mu_high - v))) /
         std::sqrt(n * v);
}

double boundary_chimeric(double beta) {
  if (!(beta > 0.5 && beta <= 1.0))
    throw std::invalid_argument("boundary_chimeric: beta must lie in (1/2, 1]");
  return 2.0 * beta - 1.0;
}

double boundary_powerlaw(double beta, double a) {
  if (!(beta > 0.5 && beta < 1.0))
    throw std::invalid_argument("boundary_powerlaw: beta must lie in (1/2, 1)");
  if (!(a >= 0.5 && a < 1.0))
    throw std::invalid_argument("boundary_powerlaw: shape exponent must lie in [1/2, 1)");
  return std::max(0.0, (beta - a) / (1.0 - a));
}

double boundary_normal_sparse(double beta, double sigma0) {
  if (!(beta > 0.5 && beta < 1.0))
    throw std::invalid_argument("boundary_normal_sparse: beta must lie in (1/2, 1)");
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("boundary_normal_sparse: sigma0 must be positive");
  const double s2 = sigma0 * sigma0;
  if (sigma0 < std::sqrt(2.0)) {
    if (beta <= 1.0 - s2 / 4.0) return (2.0 - s2) * (beta - 0.5);          // (I)
    double c = 1.0 - sigma0 * std::sqrt(1.0 - beta);                      // (II)
    return c * c;
  }
  if (beta <= 1.0 - 1.0 / s2) return 0.0;                                 // (III)
  double c = 1.0 - sigma0 * std::sqrt(1.0 - beta);                        // (IV)
  return c * c;
}

double log_exponent_E(double beta, double sigma0) {
  if (!(beta > 0.5 && beta < 1.0))
    throw std::invalid_argument("log_exponent_E: beta must lie in (1/2, 1)");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("log_exponent_E: sigma0 must be positive");
  const double s2 = sigma0 * sigma0;
  if (sigma0 < std::sqrt(2.0) && beta <= 1.0 - s2 / 4.0) return 0.0;  // case (I)
  return 0.5 - std::sqrt(1.0 - beta) / (2.0 * sigma0);
}

double boundary_normal_dense(double beta) {
  if (!(beta > 0.0 && beta < 0.5))
    throw std::invalid_argument("boundary_normal_dense: beta must lie in (0, 1/2)");
  return 0.5 - beta;
}

double analytic_boundary(const DetectionModel& m) {
  if (m.is_chimeric()) {
    const auto& h = m.chimeric().h;
    if (h.kind() == ShapeKind::PowerLaw && h.power_exponent() >= 0.5)
      return boundary_powerlaw(m.beta, h.power_exponent());
    return boundary_chimeric(m.beta);
  }
  if (m.dense) return boundary_normal_dense(m.beta);
  return boundary_normal_sparse(m.beta, m.normal_shift().sigma0);
}

namespace {
Region label_from_grid(const std::vector<ISumReport>& grid, const ClassifierConfig& cfg,
                       double* slope_out, double* last_out) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(grid.size());
  double last = 0.0;
  for (const auto& rep : grid) {
    double mag = std::max({rep.i1, rep.i2, cfg.floor_value});
    double xl = std::log10(static_cast<double>(rep.n));
    double yl = std::log10(mag);
    sx += xl; sy += yl; sxx += xl * xl; sxy += xl * yl;
    last = mag;
  }
  double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  if (slope_out) *slope_out = slope;
  if (last_out) *last_out = last;
  if (slope > cfg.slope_tol && (last > cfg.big_mag || slope > cfg.strong_slope))
    return Region::CompletelyDetectable;
  if (slope < -cfg.slope_tol && (last < cfg.small_mag || slope < -cfg.strong_slope))
    return Region::Undetectable;
  return Region::Detectable;
}
}  // namespace

RegionResult classify_region(const DetectionModel& tmpl, const ClassifierConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("classify_region: tau must be positive");
  RegionResult out;
  for (long long n : cfg.n_grid)
    out.evidence.grid.push_back(i_sums(tmpl.with_n(n), cfg.tau));
  out.label = label_from_grid(out.evidence.grid, cfg, &out.evidence.slope, &out.evidence.last);
  for (double tau : cfg.cross_taus) {
    std::vector<ISumReport> grid;
    for (long long n : cfg.n_grid) grid.push_back(i_sums(tmpl.with_n(n), tau));
    out.evidence.cross_tau.emplace_back(tau, label_from_grid(grid, cfg, nullptr, nullptr));
  }
  return out;
}

}  // namespace sigdetect
