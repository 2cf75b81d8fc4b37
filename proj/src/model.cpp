#include "sigdetect/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sigdetect/quadrature.hpp"
#include "sigdetect/special.hpp"

namespace sigdetect {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPClampLo = 1e-15;
constexpr double kPClampHi = 1.0 - 1e-15;

double chimeric_base_ratio(const DetectionModel& m, double y) {
  const double kap = m.kappa();
  const auto& sig = m.chimeric();
  double v = (y <= kap) ? sig.h(y / kap) / kap : 0.0;
  if (sig.perturbation) v += (*sig.perturbation)(y);
  return std::max(v, 0.0);
}

double normal_base_log_ratio(const DetectionModel& m, double y) {
  const double s0 = m.normal_shift().sigma0;
  const double th = m.theta();
  const double d = (y - th) / s0;
  return -std::log(s0) + 0.5 * y * y - 0.5 * d * d;
}

double base_ratio(const DetectionModel& m, double y) {
  if (m.is_chimeric()) return chimeric_base_ratio(m, y);
  return std::exp(normal_base_log_ratio(m, y));
}

void check_support(const DetectionModel& m, double y) {
  if (m.noise == Noise::UniformUnit && !(y > 0.0 && y < 1.0))
    throw std::domain_error("observation outside the (0,1) noise support");
  if (m.noise == Noise::StandardNormal && !std::isfinite(y))
    throw std::domain_error("observation must be finite");
}

double kept_mass_for(const DetectionModel& base, double tau);
}  // namespace

Perturbation Perturbation::tabulated(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::invalid_argument("perturbation: need matching grid/values with at least two nodes");
  if (grid.front() != 0.0 || grid.back() != 1.0)
    throw std::invalid_argument("perturbation: breakpoints must run from 0 to 1");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("perturbation: breakpoints must increase");
  double total = 0.0, l2 = 0.0, sup = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double w = grid[i] - grid[i - 1];
    double v0 = values[i - 1], v1 = values[i];
    total += 0.5 * (v0 + v1) * w;
    double s = (v1 - v0) / w;
    l2 += w * (v0 * v0 + v0 * s * w + s * s * w * w / 3.0);
    sup = std::max({sup, std::fabs(v0), std::fabs(v1)});
  }
  if (std::fabs(total) > 1e-9)
    throw std::invalid_argument("perturbation: must integrate to 0 (got " + std::to_string(total) + ")");
  Perturbation p;
  p.grid_ = std::move(grid);
  p.values_ = std::move(values);
  p.l2_ = l2;
  p.sup_ = sup;
  return p;
}

double Perturbation::integral(double a, double b) const {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (b <= a) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    double lo = std::max(a, grid_[i - 1]);
    double hi = std::min(b, grid_[i]);
    if (hi <= lo) continue;
    double w = grid_[i] - grid_[i - 1];
    double s = (values_[i] - values_[i - 1]) / w;
    auto anti = [&](double u) {  // antiderivative within the cell
      double t = u - grid_[i - 1];
      return values_[i - 1] * t + 0.5 * s * t * t;
    };
    total += anti(hi) - anti(lo);
  }
  return total;
}

double Perturbation::operator()(double u) const {
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  if (i == 0) i = 1;
  if (i >= grid_.size()) i = grid_.size() - 1;
  double x0 = grid_[i - 1], w = grid_[i] - x0;
  double t = (u - x0) / w;
  return values_[i - 1] * (1.0 - t) + values_[i] * t;
}

double DetectionModel::epsilon_raw() const {
  if (n < 3) throw std::invalid_argument("epsilon: need n >= 3");
  if (epsilon_override) {
    if (!(*epsilon_override >= 0.0 && *epsilon_override < 1.0))
      throw std::invalid_argument("epsilon: override must lie in [0,1)");
    return *epsilon_override;
  }
  double e = std::pow(static_cast<double>(n), -beta) *
             std::pow(std::log(static_cast<double>(n)), log_exponent);
  if (!(e > 0.0 && e < 1.0))
    throw std::invalid_argument("epsilon: n^-beta (log n)^E = " + std::to_string(e) +
                                " falls outside (0,1)");
  return e;
}

double DetectionModel::epsilon() const {
  double e = epsilon_raw();
  if (truncation) e *= truncation->kept_mass;
  return e;
}

double DetectionModel::kappa() const {
  if (!is_chimeric()) throw std::logic_error("kappa: chimeric models only");
  return std::pow(static_cast<double>(n), -r);
}

double DetectionModel::theta() const {
  if (!is_normal_shift()) throw std::logic_error("theta: normal-shift models only");
  if (dense) return std::pow(static_cast<double>(n), -r);
  return std::sqrt(2.0 * r * std::log(static_cast<double>(n)));
}

double DetectionModel::signal_density_ratio(double y) const {
  check_support(*this, y);
  double rb = base_ratio(*this, y);
  if (!truncation) return rb;
  if (truncation->kept_mass <= 0.0) return 1.0;
  if (epsilon_raw() * rb > truncation->tau) return 0.0;
  return rb / truncation->kept_mass;
}

double DetectionModel::signal_log_ratio(double y) const {
  check_support(*this, y);
  if (is_normal_shift() && !truncation) return normal_base_log_ratio(*this, y);
  double v = signal_density_ratio(y);
  return std::log(v);
}

double DetectionModel::mixture_density_ratio(double y) const {
  const double eps = epsilon();
  if (eps == 0.0) {
    check_support(*this, y);
    return 1.0;
  }
  return 1.0 + eps * (signal_density_ratio(y) - 1.0);
}

double DetectionModel::mixture_log_ratio(double y) const {
  if (epsilon() == 0.0) {
    check_support(*this, y);
    return 0.0;
  }
  if (is_normal_shift() && !truncation) {
    const double lr = normal_base_log_ratio(*this, y);
    const double le = std::log(epsilon());
    const double s = le + lr;
    // When eps * ratio dwarfs 1 (or the ratio alone overflows),
    // log(1 - eps + eps ratio) = le + lr + log1p((1-eps) exp(-s)).
    if (lr > 700.0 || s > 45.0)
      return s + (s > 700.0 ? 0.0 : std::log1p((1.0 - epsilon()) * std::exp(-s)));
    return std::log1p(epsilon() * std::expm1(lr));
  }
  return std::log1p(epsilon() * (signal_density_ratio(y) - 1.0));
}

DetectionModel DetectionModel::with_n(long long m) const {
  DetectionModel out = *this;
  out.n = m;
  if (out.truncation) out.truncation->kept_mass = kept_mass_for(out, out.truncation->tau);
  return out;
}

std::string DetectionModel::label() const {
  std::string s;
  if (is_chimeric()) {
    s = "chimeric(h=" + chimeric().h.label();
    if (chimeric().perturbation) s += "+pert";
  } else {
    s = std::string(dense ? "normal-dense(sigma0=" : "normal(sigma0=") +
        std::to_string(normal_shift().sigma0);
  }
  s += ", beta=" + std::to_string(beta) + ", r=" + std::to_string(r);
  if (log_exponent != 0.0) s += ", E=" + std::to_string(log_exponent);
  s += ", n=" + std::to_string(n) + ")";
  return s;
}

namespace {
void validate_chimeric_density(const DetectionModel& m) {
  const auto& sig = m.chimeric();
  if (!sig.perturbation) return;
  const double kap = m.kappa();
  const int grid = 4096;
  for (int i = 1; i < grid; ++i) {
    double u = static_cast<double>(i) / grid;
    double v = (u <= kap ? sig.h(u / kap) / kap : 0.0) + (*sig.perturbation)(u);
    if (v < -1e-9)
      throw std::invalid_argument("perturbed signal density dips below 0 near u=" +
                                  std::to_string(u));
  }
}
}  // namespace

DetectionModel make_chimeric(long long n, double beta, double r, ShapeFunction h,
                             double log_exponent, std::optional<Perturbation> pert) {
  if (!(beta > 0.5 && beta <= 1.0))
    throw std::invalid_argument("chimeric model: beta must lie in (1/2, 1]");
  if (!(r > 0.0)) throw std::invalid_argument("chimeric model: r must be positive");
  DetectionModel m;
  m.n = n;
  m.beta = beta;
  m.r = r;
  m.log_exponent = log_exponent;
  m.noise = Noise::UniformUnit;
  m.signal = ChimericSignal{std::move(h), std::move(pert)};
  (void)m.epsilon();  // validate
  validate_chimeric_density(m);
  return m;
}

DetectionModel make_normal(long long n, double beta, double r, double sigma0,
                           double log_exponent, bool dense) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("normal model: sigma0 must be positive");
  if (dense) {
    if (!(beta > 0.0 && beta < 0.5))
      throw std::invalid_argument("normal dense model: beta must lie in (0, 1/2)");
  } else if (!(beta > 0.5 && beta <= 1.0)) {
    throw std::invalid_argument("normal sparse model: beta must lie in (1/2, 1]");
  }
  if (!(r > 0.0)) throw std::invalid_argument("normal model: r must be positive");
  DetectionModel m;
  m.n = n;
  m.beta = beta;
  m.r = r;
  m.log_exponent = log_exponent;
  m.noise = Noise::StandardNormal;
  m.signal = NormalShiftSignal{sigma0};
  m.dense = dense;
  (void)m.epsilon();
  return m;
}

std::vector<double> sample_null(const DetectionModel& m, std::size_t count, Stream& stream) {
  if (count < 1) throw std::invalid_argument("sample_null: count must be >= 1");
  std::vector<double> out(count);
  if (m.noise == Noise::UniformUnit) {
    for (auto& v : out) v = stream.next_uniform();
  } else {
    for (auto& v : out) v = stream.next_normal();
  }
  return out;
}

namespace {
double draw_signal(const DetectionModel& m, Stream& stream) {
  if (m.is_normal_shift()) {
    double y = m.theta() + m.normal_shift().sigma0 * stream.next_normal();
    if (m.truncation) {
      if (m.truncation->kept_mass <= 0.0) return stream.next_normal();  // mu~ = P0
      const double tau = m.truncation->tau, er = m.epsilon_raw();
      while (er * std::exp(normal_base_log_ratio(m, y)) > tau)
        y = m.theta() + m.normal_shift().sigma0 * stream.next_normal();
    }
    return y;
  }
  const auto& sig = m.chimeric();
  const double kap = m.kappa();
  auto draw_base = [&]() -> double {
    if (!sig.perturbation) return kap * sig.h.quantile(stream.next_uniform());
    // Rejection against the mixture envelope (1/kap) h(u/kap) 1{u<=kap} + sup|r|,
    // which dominates the perturbed density on all of (0,1).
    const double big = sig.perturbation->sup_abs();
    for (;;) {
      double u;
      if (stream.next_uniform() * (1.0 + big) < 1.0) {
        u = kap * sig.h.quantile(stream.next_uniform());
      } else {
        u = stream.next_uniform();
      }
      double envelope = (u <= kap ? sig.h(u / kap) / kap : 0.0) + big;
      double density = chimeric_base_ratio(m, u);
      if (stream.next_uniform() * envelope <= density) return u;
    }
  };
  double y = draw_base();
  if (m.truncation) {
    if (m.truncation->kept_mass <= 0.0) return stream.next_uniform();  // mu~ = P0
    const double tau = m.truncation->tau, er = m.epsilon_raw();
    while (er * chimeric_base_ratio(m, y) > tau) y = draw_base();
  }
  return y;
}
}  // namespace

AltSample sample_alternative(const DetectionModel& m, Stream& stream) {
  const double eps = m.epsilon();
  AltSample out;
  out.values.resize(static_cast<std::size_t>(m.n));
  const bool uniform = (m.noise == Noise::UniformUnit);
  for (auto& v : out.values) {
    if (stream.next_uniform() < eps) {
      v = draw_signal(m, stream);
      ++out.signal_count;
    } else {
      v = uniform ? stream.next_uniform() : stream.next_normal();
    }
  }
  return out;
}

std::vector<double> to_pvalues(const DetectionModel& m, std::span<const double> obs) {
  std::vector<double> out(obs.size());
  if (m.noise == Noise::UniformUnit) {
    for (std::size_t i = 0; i < obs.size(); ++i)
      out[i] = std::clamp(obs[i], kPClampLo, kPClampHi);
  } else {
    for (std::size_t i = 0; i < obs.size(); ++i)
      out[i] = std::clamp(norm_sf(obs[i]), kPClampLo, kPClampHi);
  }
  return out;
}

PerturbationReport perturbation_admissible(const DetectionModel& m,
                                           std::span<const double> l2_override) {
  static const long long kGrid[] = {1000, 10000, 100000, 1000000, 10000000};
  if (l2_override.empty() && !m.is_chimeric())
    throw std::invalid_argument("perturbation_admissible: chimeric models only");
  double own_l2 = 0.0;
  if (l2_override.empty() && m.chimeric().perturbation)
    own_l2 = m.chimeric().perturbation->l2();

  PerturbationReport rep;
  std::size_t k = 0;
  for (long long n : kGrid) {
    double l2 = l2_override.empty()
                    ? own_l2
                    : l2_override[std::min(k, l2_override.size() - 1)];
    DetectionModel at = m.with_n(n);
    rep.grid.emplace_back(n, static_cast<double>(n) * at.epsilon_raw() * at.epsilon_raw() * l2);
    ++k;
  }
  rep.value = static_cast<double>(m.n) * m.epsilon_raw() * m.epsilon_raw() * own_l2;
  double maxval = 0.0;
  for (auto& [n, s] : rep.grid) maxval = std::max(maxval, s);
  if (maxval < 1e-30) {
    rep.admissible = true;
    return rep;
  }
  // least-squares slope of log s against log n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(rep.grid.size());
  for (auto& [n, s] : rep.grid) {
    double x = std::log(static_cast<double>(n));
    double y = std::log(std::max(s, 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  rep.admissible = slope < -1e-3;
  return rep;
}

namespace {
double kept_mass_for(const DetectionModel& base, double tau) {
  DetectionModel m = base;
  m.truncation.reset();
  const double er = m.epsilon_raw();
  if (m.is_normal_shift()) {
    ExceedRegion reg = normal_exceed_region(m, tau);
    return std::clamp(1.0 - reg.mu_probability(m), 0.0, 1.0);
  }
  const auto& sig = m.chimeric();
  const double kap = m.kappa();
  if (!sig.perturbation) {
    // eps * h(v)/kap > tau  <=>  h(v) > tau kap / eps
    auto ls = sig.h.superlevel(tau * kap / er);
    return std::clamp(1.0 - ls.h_mass, 0.0, 1.0);
  }
  auto f = [&](double u) {
    double d = chimeric_base_ratio(m, u);
    return (er * d <= tau) ? d : 0.0;
  };
  double kept = integrate(f, 0.0, kap, QuadOptions{1e-10, 1e-9, kap / 256.0, 6000}) +
                integrate(f, kap, 1.0, QuadOptions{1e-10, 1e-9, (1.0 - kap) / 256.0, 6000});
  return std::clamp(kept, 0.0, 1.0);
}
}  // namespace

DetectionModel truncate_model(const DetectionModel& m, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("truncate_model: tau must be positive");
  DetectionModel out = m;
  out.truncation = Truncation{tau, kept_mass_for(m, tau)};
  return out;
}

double ExceedRegion::mu_probability(const DetectionModel& m) const {
  const double th = m.theta();
  const double s0 = m.normal_shift().sigma0;
  double p = 0.0;
  for (auto& [a, b] : intervals)
    p += norm_cdf((b - th) / s0) - norm_cdf((a - th) / s0);
  return std::clamp(p, 0.0, 1.0);
}

double ExceedRegion::p0_probability() const {
  double p = 0.0;
  for (auto& [a, b] : intervals) p += norm_cdf(b) - norm_cdf(a);
  return std::clamp(p, 0.0, 1.0);
}

ExceedRegion normal_exceed_region(const DetectionModel& m, double x) {
  if (!m.is_normal_shift()) throw std::logic_error("normal_exceed_region: normal models only");
  if (!(x > 0.0)) throw std::invalid_argument("normal_exceed_region: threshold must be positive");
  const double s0 = m.normal_shift().sigma0;
  const double th = m.theta();
  const double eps = m.epsilon_raw();
  if (eps == 0.0) return ExceedRegion{};  // 0 * ratio never exceeds x > 0
  // eps * ratio(y) > x  <=>  A y^2 + B y + C > 0
  const double A = 0.5 - 0.5 / (s0 * s0);
  const double B = th / (s0 * s0);
  const double C = -0.5 * th * th / (s0 * s0) - std::log(s0) + std::log(eps) - std::log(x);
  ExceedRegion reg;
  if (std::fabs(A) < 1e-14) {
    if (std::fabs(B) < 1e-14) {
      if (C > 0.0) reg.intervals.push_back({-kInf, kInf});
      return reg;
    }
    if (B > 0.0)
      reg.intervals.push_back({-C / B, kInf});
    else
      reg.intervals.push_back({-kInf, -C / B});
    return reg;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) {
    if (A > 0.0) reg.intervals.push_back({-kInf, kInf});
    return reg;
  }
  const double sq = std::sqrt(disc);
  const double y1 = (-B - sq) / (2.0 * A);
  const double y2 = (-B + sq) / (2.0 * A);
  const double lo = std::min(y1, y2), hi = std::max(y1, y2);
  if (A > 0.0) {
    reg.intervals.push_back({-kInf, lo});
    reg.intervals.push_back({hi, kInf});
  } else {
    reg.intervals.push_back({lo, hi});
  }
  return reg;
}

}  // namespace sigdetect
