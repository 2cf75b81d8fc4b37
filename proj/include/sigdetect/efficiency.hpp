// efficiency.hpp - Pitman efficiency of mismatched LLR tests under Gaussian limits.
#pragma once

#include <stdexcept>
#include <vector>

#include "sigdetect/model.hpp"

namespace sigdetect {

struct GammaTrace {
  std::vector<std::pair<long long, double>> values;  // (n, gamma_n)
  bool stabilized = false;
};

/// Thrown when the n-grid evaluation of gamma does not settle.
class NonStabilizingLimit : public std::runtime_error {
 public:
  NonStabilizingLimit(const std::string& what, GammaTrace trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  GammaTrace trace;
};

/// gamma(theta_j, theta_r) = lim n eps_j eps_r Cov_P0(dmu_j/dP, dmu_r/dP),
/// evaluated along an n-grid until successive values stabilize within 1e-4
/// relative. Models must share the noise family. Normal models sitting on the
/// case-(I) right endpoint (beta = 1 - sigma0^2/4) are routed through
/// truncate_model(tau = 1) first, where the raw variance limit overshoots
/// sigma^2.
double gamma_cross(const DetectionModel& a, const DetectionModel& b,
                   GammaTrace* trace = nullptr);

/// Pitman asymptotic relative efficiency gamma_12^2 / (gamma_11 gamma_22),
/// clamped to [0,1].
double are(const DetectionModel& a, const DetectionModel& b);

/// Closed-form ARE for two shapes sharing (beta, r) on the boundary:
/// <h1,h2>^2 / (<h1,h1> <h2,h2>). No n-grid involved.
double are_same_boundary(const ShapeFunction& h1, const ShapeFunction& h2);

/// Asymptotic power Phi(gamma_12 / sqrt(gamma_22) + u_alpha) of the
/// theta_2-based LLR test when theta_1 is true.
double mismatched_power(const DetectionModel& true_model, const DetectionModel& assumed,
                        double alpha);

}  // namespace sigdetect
