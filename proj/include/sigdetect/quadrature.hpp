// quadrature.hpp - adaptive Gauss-Kronrod integration.
#pragma once

#include <functional>

namespace sigdetect {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  // Panels are never wider than this before refinement starts; used to keep
  // oscillatory integrands (characteristic functions) resolved.
  double max_panel = 0.0;  // 0 disables
  int max_segments = 4000;
};

/// Adaptive (G7,K15) integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opts = {});

/// Integral of f over [a, +inf) via the substitution x = a - log(u), u in (0,1].
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadOptions& opts = {});

}  // namespace sigdetect
