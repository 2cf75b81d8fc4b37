// shape.hpp - probability densities h on (0,1) used as signal shapes.
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace sigdetect {

enum class ShapeKind { Constant, PowerLaw, Linear2x, Tabulated };

/// A probability density on (0,1) with cached moments, CDF and quantile.
///
/// PowerLaw(a) is h(x) = (1-a) x^{-a} for a in [0,1); its second moment is
/// finite only for a < 1/2. Tabulated shapes interpolate linearly between
/// breakpoints and must integrate to 1 within 1e-9.
class ShapeFunction {
 public:
  static ShapeFunction constant();
  static ShapeFunction power_law(double a);
  static ShapeFunction linear2x();
  static ShapeFunction tabulated(std::vector<double> grid, std::vector<double> values);

  ShapeKind kind() const { return kind_; }
  double power_exponent() const { return a_; }

  double operator()(double x) const;  // density value, x in (0,1)
  double cdf(double x) const;
  double quantile(double u) const;

  double integral() const { return 1.0; }
  double l2() const { return l2_; }            // ∫ h^2, may be +inf
  double l2p(double delta) const;              // ∫ h^{2+delta}
  double mean() const { return mean_; }        // ∫ x h(x) dx
  bool l2_finite() const { return l2_ < std::numeric_limits<double>::infinity(); }

  /// ∫_0^1 h(u) g(u) du by closed form per cell (tabulated) or quadrature.
  double integrate_against(const std::function<double(double)>& g) const;

  /// Level-set functionals of h at threshold c:
  ///   measure      = lambda{u : h(u) > c}
  ///   h_mass       = ∫ h 1{h > c}
  ///   h2_sublevel  = ∫ h^2 1{h <= c}   (finite even when ∫h^2 = inf)
  struct LevelSet {
    double measure;
    double h_mass;
    double h2_sublevel;
  };
  LevelSet superlevel(double c) const;

  std::string label() const;

 private:
  ShapeFunction() = default;
  void finalize();

  ShapeKind kind_ = ShapeKind::Constant;
  double a_ = 0.0;                   // power-law exponent
  std::vector<double> grid_;         // tabulated breakpoints
  std::vector<double> values_;       // tabulated node values
  std::vector<double> cum_;          // tabulated cumulative masses at breakpoints
  double l2_ = 1.0;
  double mean_ = 0.5;
};

}  // namespace sigdetect
