// special.hpp - normal distribution helpers and small numeric utilities.
#pragma once

#include <cmath>

namespace sigdetect {

inline double norm_pdf(double x) {
  return 0.3989422804014326779399460599344 * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244008443621); }

inline double norm_sf(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244008443621); }

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double norm_quantile(double p);

/// CDF of the squared-Gumbel law, the null limit of the normalized HC statistic.
inline double gumbel_sq_cdf(double x) { return std::exp(-2.0 * std::exp(-x)); }

/// Kahan compensated accumulator.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sigdetect
