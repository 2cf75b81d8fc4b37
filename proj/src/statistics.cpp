#include "sigdetect/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sigdetect/special.hpp"

namespace sigdetect {

HcValue hc_statistic(std::span<const double> pvals, double max_t) {
  if (pvals.empty()) throw std::invalid_argument("hc_statistic: empty p-value vector");
  if (!(max_t > 0.0 && max_t <= 1.0))
    throw std::invalid_argument("hc_statistic: max_t must lie in (0,1]");
  std::vector<double> p(pvals.begin(), pvals.end());
  std::sort(p.begin(), p.end());
  if (!(p.front() > 0.0 && p.back() < 1.0))
    throw std::invalid_argument("hc_statistic: p-values must lie strictly inside (0,1)");
  const std::size_t k = p.size();
  const double sk = std::sqrt(static_cast<double>(k));
  HcValue out;
  out.raw = -1.0;
  std::size_t cnt = 0;
  for (; cnt < k && p[cnt] < max_t; ++cnt) {
    const double t = p[cnt];
    const double denom = std::sqrt(t * (1.0 - t));
    const double hi = std::fabs(static_cast<double>(cnt + 1) / k - t);
    const double lo = std::fabs(static_cast<double>(cnt) / k - t);
    const double cand = sk * std::max(hi, lo) / denom;
    if (cand > out.raw) {
      out.raw = cand;
      out.argmax_t = t;
    }
  }
  if (max_t < 1.0) {  // truncated sup also approaches the right endpoint
    const double cand = sk * std::fabs(static_cast<double>(cnt) / k - max_t) /
                        std::sqrt(max_t * (1.0 - max_t));
    if (cand > out.raw) {
      out.raw = cand;
      out.argmax_t = max_t;
    }
  }
  if (k >= 16) {
    auto [a, b] = hc_normalizers(k);
    out.normalized = a * out.raw - b;
  } else {
    out.normalized = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::pair<double, double> hc_normalizers(std::size_t k) {
  if (k < 16)
    throw std::invalid_argument("hc_normalizers: k >= 16 keeps the nested logs positive");
  const double ll = std::log(std::log(static_cast<double>(k)));
  const double a = std::sqrt(2.0 * ll);
  const double b = 2.0 * ll + 0.5 * std::log(ll) - 0.5 * std::log(3.14159265358979323846);
  return {a, b};
}

double hc_asymptotic_critical(std::size_t k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("hc_asymptotic_critical: alpha must lie in (0,1)");
  auto [a, b] = hc_normalizers(k);
  const double x = -std::log(-std::log(1.0 - alpha) / 2.0);
  return (x + b) / a;
}

LlrValue llr_statistic(const DetectionModel& m, std::span<const double> obs) {
  KahanSum sum;
  for (double y : obs) sum.add(m.mixture_log_ratio(y));
  return LlrValue{sum.value(), obs.size()};
}

double zn_statistic(const DetectionModel& m, std::span<const double> obs) {
  KahanSum sum;
  const double eps = m.epsilon();
  for (double y : obs) sum.add(eps * (m.signal_density_ratio(y) - 1.0));
  return sum.value();
}

}  // namespace sigdetect
