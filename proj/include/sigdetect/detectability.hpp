// detectability.hpp - I-sum machinery, detection boundaries, region classifier.
//
// The two truncated moment sums
//   I_{n,1,x} = n eps mu(eps dmu/dP > x)
//   I_{n,2,x} = n eps^2 E_P[(dmu/dP)^2 1{eps dmu/dP <= x} - 1]
// drive the trichotomy: both to 0 means undetectable, either to infinity means
// completely detectable, anything else leaves a nondegenerate limit.
#pragma once

#include <string>
#include <vector>

#include "sigdetect/model.hpp"

namespace sigdetect {

enum class Region { Undetectable, Detectable, CompletelyDetectable };
std::string to_string(Region r);

struct ISumReport {
  double x = 1.0;
  double i1 = 0.0;
  double i2 = 0.0;
  long long n = 0;
};

/// Evaluate the two I-sums at threshold x > 0. Closed forms are used for
/// unperturbed chimeric shapes and the normal family; perturbed chimeric
/// models go through crossing-resolved quadrature. Truncated models are not
/// supported here.
ISumReport i_sums(const DetectionModel& m, double x);

/// D_n = n d^2(P0, Q_n), the squared-Hellinger sum, by quadrature of the
/// stable form 0.5 (sqrt(dQ/dP) - 1)^2.
double hellinger_sum(const DetectionModel& m);

/// Variational distance ||P0 - mu|| = sup_A |mu(A) - P0(A)| (half L1).
double total_variation_p_mu(const DetectionModel& m);

/// HC detectability functional H_n(v) on the p-value scale, v in (0, 1/2).
double hn_v(const DetectionModel& m, double v);

/// Detection boundaries r*(beta).
double boundary_chimeric(double beta);                       // 2 beta - 1
double boundary_powerlaw(double beta, double a);             // max(0, (beta-a)/(1-a))
double boundary_normal_sparse(double beta, double sigma0);   // four-case formula
double log_exponent_E(double beta, double sigma0);           // 0 on case (I), else 1/2 - sqrt(1-beta)/(2 sigma0)
double boundary_normal_dense(double beta);                   // 1/2 - beta

/// Boundary of the model's own family at its beta.
double analytic_boundary(const DetectionModel& m);

struct ClassifierConfig {
  std::vector<long long> n_grid = {1000, 10000, 100000, 1000000, 10000000};
  double tau = 1.0;
  std::vector<double> cross_taus = {0.5, 2.0};
  // Decision thresholds on the fitted slope of log max(I1, I2) against log n
  // and on the magnitude at the largest grid point. A slope beyond
  // strong_slope decides on its own; a weak slope needs the magnitude on its
  // side as well.
  double slope_tol = 0.02;
  double strong_slope = 0.04;
  double big_mag = 10.0;
  double small_mag = 0.01;
  double floor_value = 1e-12;
};

struct RegionEvidence {
  std::vector<ISumReport> grid;  // at the primary tau
  double slope = 0.0;
  double last = 0.0;
  std::vector<std::pair<double, Region>> cross_tau;
};

struct RegionResult {
  Region label = Region::Detectable;
  RegionEvidence evidence;
};

/// Numerically classify a model family by the trend of its I-sums along the
/// n-grid. The model's n field is ignored; each grid point re-instantiates it.
RegionResult classify_region(const DetectionModel& tmpl, const ClassifierConfig& cfg = {});

}  // namespace sigdetect
