#include "sigdetect/efficiency.hpp"

#include <algorithm>
#include <cmath>

#include "sigdetect/detectability.hpp"
#include "sigdetect/quadrature.hpp"
#include "sigdetect/special.hpp"

namespace sigdetect {

namespace {

bool needs_truncation(const DetectionModel& m) {
  if (!m.is_normal_shift() || m.truncation || m.dense) return false;
  const double s0 = m.normal_shift().sigma0;
  return s0 < std::sqrt(2.0) && std::fabs(m.beta - (1.0 - s0 * s0 / 4.0)) < 1e-12;
}

// n eps_a eps_b Cov_P0(ratio_a, ratio_b) at a common n.
double gamma_at_n(const DetectionModel& a, const DetectionModel& b, long long n) {
  DetectionModel ma = a.with_n(n), mb = b.with_n(n);
  const double scale = static_cast<double>(n) * ma.epsilon() * mb.epsilon();
  if (ma.is_chimeric()) {
    // E[ratio_a ratio_b] is the overlap of the shrunk shapes; E ratio = 1 for
    // untruncated signals, so Cov = overlap - E_a E_b with closed-form means.
    const double ka = ma.kappa(), kb = mb.kappa();
    const double kmin = std::min(ka, kb);
    auto ra = [&](double y) { return ma.signal_density_ratio(y); };
    auto rb = [&](double y) { return mb.signal_density_ratio(y); };
    double overlap =
        integrate([&](double y) { return ra(y) * rb(y); }, 0.0, kmin,
                  QuadOptions{1e-14, 1e-9, 0.0, 8000});
    if (ma.chimeric().perturbation || mb.chimeric().perturbation || ma.truncation ||
        mb.truncation) {
      overlap += integrate([&](double y) { return ra(y) * rb(y); }, kmin, 1.0,
                           QuadOptions{1e-14, 1e-9, 0.0, 8000});
      double mean_a = integrate(ra, 0.0, ka, QuadOptions{1e-14, 1e-9, 0.0, 8000}) +
                      integrate(ra, ka, 1.0, QuadOptions{1e-14, 1e-9, 0.0, 8000});
      double mean_b = integrate(rb, 0.0, kb, QuadOptions{1e-14, 1e-9, 0.0, 8000}) +
                      integrate(rb, kb, 1.0, QuadOptions{1e-14, 1e-9, 0.0, 8000});
      return scale * (overlap - mean_a * mean_b);
    }
    return scale * (overlap - 1.0);
  }
  // normal family: Gaussian quadrature over a range covering noise and both
  // signal bumps
  const double sa = ma.normal_shift().sigma0, sb = mb.normal_shift().sigma0;
  const double ymax =
      std::max({15.0, ma.theta() + 18.0 * sa, mb.theta() + 18.0 * sb});
  auto ra = [&](double y) { return ma.signal_density_ratio(y); };
  auto rb = [&](double y) { return mb.signal_density_ratio(y); };
  double exy = integrate([&](double y) { return ra(y) * rb(y) * norm_pdf(y); }, -ymax, ymax,
                         QuadOptions{1e-16, 1e-9, 0.5, 8000});
  double ea = integrate([&](double y) { return ra(y) * norm_pdf(y); }, -ymax, ymax,
                        QuadOptions{1e-16, 1e-9, 0.5, 8000});
  double eb = integrate([&](double y) { return rb(y) * norm_pdf(y); }, -ymax, ymax,
                        QuadOptions{1e-16, 1e-9, 0.5, 8000});
  return scale * (exy - ea * eb);
}

}  // namespace

double gamma_cross(const DetectionModel& a, const DetectionModel& b, GammaTrace* trace) {
  if (a.noise != b.noise)
    throw std::invalid_argument("gamma_cross: models must share the noise family");
  DetectionModel ma = needs_truncation(a) ? truncate_model(a, 1.0) : a;
  DetectionModel mb = needs_truncation(b) ? truncate_model(b, 1.0) : b;
  static const long long kGrid[] = {10000,      100000,      1000000,
                                    10000000,   100000000,   1000000000,
                                    10000000000, 100000000000, 1000000000000,
                                    10000000000000};
  GammaTrace tr;
  std::vector<double> vals;
  double value = 0.0;
  double prev_extrap = 0.0;
  bool have_extrap = false;
  for (long long n : kGrid) {
    double g = gamma_at_n(ma, mb, n);
    tr.values.emplace_back(n, g);
    vals.push_back(g);
    std::size_t k = vals.size();
    if (k >= 2 &&
        std::fabs(vals[k - 1] - vals[k - 2]) <= 1e-4 * std::max(1.0, std::fabs(vals[k - 1]))) {
      tr.stabilized = true;
      value = vals[k - 1];
      break;
    }
    // Power-law corrections gamma_n = gamma + c n^{-p} settle too slowly for
    // the plain rule on a desk grid; Aitken extrapolation removes them when
    // the successive differences shrink geometrically.
    if (k >= 3) {
      double d1 = vals[k - 2] - vals[k - 3];
      double d2 = vals[k - 1] - vals[k - 2];
      if (d1 != 0.0) {
        double q = d2 / d1;
        if (q > 1e-6 && q < 0.97) {
          double extrap = vals[k - 1] + d2 * q / (1.0 - q);
          if (have_extrap &&
              std::fabs(extrap - prev_extrap) <= 1e-4 * std::max(1.0, std::fabs(extrap))) {
            tr.stabilized = true;
            value = extrap;
            break;
          }
          prev_extrap = extrap;
          have_extrap = true;
        } else {
          have_extrap = false;
        }
      }
    }
  }
  if (trace) *trace = tr;
  if (!tr.stabilized) {
    std::string what = "gamma_cross: no stable limit along the n-grid (";
    for (auto& [n, g] : tr.values) what += std::to_string(g) + " ";
    what += ")";
    throw NonStabilizingLimit(what, tr);
  }
  return value;
}

double are_same_boundary(const ShapeFunction& h1, const ShapeFunction& h2) {
  if (!h1.l2_finite() || !h2.l2_finite())
    throw std::invalid_argument("are_same_boundary: shapes must be square-integrable");
  double cross = h1.integrate_against([&](double x) { return h2(x); });
  double v = cross * cross / (h1.l2() * h2.l2());
  return std::clamp(v, 0.0, 1.0);
}

double are(const DetectionModel& a, const DetectionModel& b) {
  const double g11 = gamma_cross(a, a);
  const double g22 = gamma_cross(b, b);
  if (!(g11 > 0.0) || !(g22 > 0.0))
    throw std::invalid_argument("are: degenerate diagonal gamma");
  const double g12 = gamma_cross(a, b);
  double v = g12 * g12 / (g11 * g22);
  return std::clamp(v, 0.0, 1.0);
}

double mismatched_power(const DetectionModel& true_model, const DetectionModel& assumed,
                        double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("mismatched_power: alpha must lie in (0,1)");
  const double g22 = gamma_cross(assumed, assumed);
  if (!(g22 > 0.0)) throw std::invalid_argument("mismatched_power: degenerate gamma_22");
  const double g12 = gamma_cross(true_model, assumed);
  return norm_cdf(g12 / std::sqrt(g22) + norm_quantile(alpha));
}

}  // namespace sigdetect
