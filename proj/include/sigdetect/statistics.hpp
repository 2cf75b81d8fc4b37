// statistics.hpp - the test statistics: higher criticism and log-likelihood ratio.
#pragma once

#include <span>
#include <vector>

#include "sigdetect/model.hpp"

namespace sigdetect {

struct HcValue {
  double raw = 0.0;         // sup over t in (0,1)
  double normalized = 0.0;  // a_k raw - b_k, NaN when k < 16
  double argmax_t = 0.0;    // smallest t attaining the supremum
};

struct LlrValue {
  double value = 0.0;
  std::size_t n_terms = 0;
};

/// Exact supremum of |sqrt(k) (F_k(t) - t) / sqrt(t (1-t))| over t in (0, max_t).
///
/// Between order statistics the candidate function is monotone in t, so the
/// supremum is attained at the order statistics; both the left and right
/// limits of F_k are evaluated at each of them. p-values must lie in (0,1).
HcValue hc_statistic(std::span<const double> pvals, double max_t = 1.0);

/// Jaeschke centering constants: a = sqrt(2 log log k),
/// b = 2 log log k + log(log log k)/2 - log(pi)/2. Requires k >= 16.
std::pair<double, double> hc_normalizers(std::size_t k);

/// (x_{1-alpha} + b_k)/a_k with x_q = -log(-log(q)/2) the Lambda^2 quantile.
///
/// Note on the printed constant: rejecting when a HC - b exceeds
/// -log(-log(alpha)/2) gives asymptotic rejection probability 1 - alpha, so a
/// level-alpha test needs the 1-alpha quantile used here.
double hc_asymptotic_critical(std::size_t k, double alpha);

/// T_n = sum_i log dQ/dP(y_i), accumulated with compensated summation.
LlrValue llr_statistic(const DetectionModel& m, std::span<const double> obs);

/// Z_n = sum_i eps (dmu/dP(y_i) - 1), the linearization of T_n.
double zn_statistic(const DetectionModel& m, std::span<const double> obs);

}  // namespace sigdetect
