#include "sigdetect/shape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigdetect/quadrature.hpp"

namespace sigdetect {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// ∫ (v0 + s u)^2 du over [0, w]
double l2_cell(double v0, double s, double w) {
  return w * (v0 * v0 + v0 * s * w + s * s * w * w / 3.0);
}
}  // namespace

ShapeFunction ShapeFunction::constant() {
  ShapeFunction h;
  h.kind_ = ShapeKind::Constant;
  h.finalize();
  return h;
}

ShapeFunction ShapeFunction::power_law(double a) {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("power_law: exponent must lie in [0,1)");
  ShapeFunction h;
  h.kind_ = ShapeKind::PowerLaw;
  h.a_ = a;
  h.finalize();
  return h;
}

ShapeFunction ShapeFunction::linear2x() {
  ShapeFunction h;
  h.kind_ = ShapeKind::Linear2x;
  h.finalize();
  return h;
}

ShapeFunction ShapeFunction::tabulated(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::invalid_argument("tabulated: need matching grid/values with at least two nodes");
  if (grid.front() != 0.0 || grid.back() != 1.0)
    throw std::invalid_argument("tabulated: breakpoints must run from 0 to 1");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw std::invalid_argument("tabulated: breakpoints must increase");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("tabulated: values must be >= 0");
  ShapeFunction h;
  h.kind_ = ShapeKind::Tabulated;
  h.grid_ = std::move(grid);
  h.values_ = std::move(values);
  h.cum_.assign(h.grid_.size(), 0.0);
  for (std::size_t i = 1; i < h.grid_.size(); ++i) {
    double w = h.grid_[i] - h.grid_[i - 1];
    h.cum_[i] = h.cum_[i - 1] + 0.5 * (h.values_[i - 1] + h.values_[i]) * w;
  }
  if (std::fabs(h.cum_.back() - 1.0) > 1e-9)
    throw std::invalid_argument("tabulated: density must integrate to 1 (got " +
                                std::to_string(h.cum_.back()) + ")");
  h.finalize();
  return h;
}

void ShapeFunction::finalize() {
  switch (kind_) {
    case ShapeKind::Constant:
      l2_ = 1.0;
      mean_ = 0.5;
      break;
    case ShapeKind::PowerLaw:
      l2_ = (a_ < 0.5) ? (1.0 - a_) * (1.0 - a_) / (1.0 - 2.0 * a_) : kInf;
      mean_ = (1.0 - a_) / (2.0 - a_);
      break;
    case ShapeKind::Linear2x:
      l2_ = 4.0 / 3.0;
      mean_ = 2.0 / 3.0;
      break;
    case ShapeKind::Tabulated: {
      double l2 = 0.0, mean = 0.0;
      for (std::size_t i = 1; i < grid_.size(); ++i) {
        double x0 = grid_[i - 1], w = grid_[i] - x0;
        double v0 = values_[i - 1], s = (values_[i] - v0) / w;
        l2 += l2_cell(v0, s, w);
        // ∫ (x0+u)(v0+su) du over [0,w]
        mean += x0 * (v0 * w + 0.5 * s * w * w) + 0.5 * v0 * w * w + s * w * w * w / 3.0;
      }
      l2_ = l2;
      mean_ = mean;
      break;
    }
  }
}

double ShapeFunction::operator()(double x) const {
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  switch (kind_) {
    case ShapeKind::Constant:
      return 1.0;
    case ShapeKind::PowerLaw:
      return (1.0 - a_) * std::pow(x, -a_);
    case ShapeKind::Linear2x:
      return 2.0 * x;
    case ShapeKind::Tabulated: {
      auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
      std::size_t i = static_cast<std::size_t>(it - grid_.begin());
      if (i == 0) i = 1;
      if (i >= grid_.size()) i = grid_.size() - 1;
      double x0 = grid_[i - 1], w = grid_[i] - x0;
      double t = (x - x0) / w;
      return values_[i - 1] * (1.0 - t) + values_[i] * t;
    }
  }
  return 0.0;
}

double ShapeFunction::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  switch (kind_) {
    case ShapeKind::Constant:
      return x;
    case ShapeKind::PowerLaw:
      return std::pow(x, 1.0 - a_);
    case ShapeKind::Linear2x:
      return x * x;
    case ShapeKind::Tabulated: {
      auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
      std::size_t i = static_cast<std::size_t>(it - grid_.begin());
      if (i == 0) i = 1;
      if (i >= grid_.size()) i = grid_.size() - 1;
      double x0 = grid_[i - 1], w = grid_[i] - x0;
      double v0 = values_[i - 1], s = (values_[i] - v0) / w;
      double u = x - x0;
      return cum_[i - 1] + v0 * u + 0.5 * s * u * u;
    }
  }
  return 0.0;
}

double ShapeFunction::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile: u must lie in [0,1]");
  switch (kind_) {
    case ShapeKind::Constant:
      return u;
    case ShapeKind::PowerLaw:
      return std::pow(u, 1.0 / (1.0 - a_));
    case ShapeKind::Linear2x:
      return std::sqrt(u);
    case ShapeKind::Tabulated: {
      auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
      std::size_t i = static_cast<std::size_t>(it - cum_.begin());
      if (i == 0) i = 1;
      if (i >= grid_.size()) i = grid_.size() - 1;
      double x0 = grid_[i - 1], w = grid_[i] - x0;
      double v0 = values_[i - 1], s = (values_[i] - v0) / w;
      double target = u - cum_[i - 1];
      double t;
      if (std::fabs(s) < 1e-14) {
        t = (v0 > 0.0) ? target / v0 : 0.5 * w;
      } else {
        double disc = v0 * v0 + 2.0 * s * target;
        t = (-v0 + std::sqrt(std::max(0.0, disc))) / s;
      }
      return x0 + std::clamp(t, 0.0, w);
    }
  }
  return u;
}

double ShapeFunction::l2p(double delta) const {
  const double p = 2.0 + delta;
  switch (kind_) {
    case ShapeKind::Constant:
      return 1.0;
    case ShapeKind::PowerLaw:
      return (p * a_ < 1.0) ? std::pow(1.0 - a_, p) / (1.0 - p * a_) : kInf;
    case ShapeKind::Linear2x:
      return std::pow(2.0, p) / (p + 1.0);
    case ShapeKind::Tabulated: {
      double total = 0.0;
      for (std::size_t i = 1; i < grid_.size(); ++i) {
        double w = grid_[i] - grid_[i - 1];
        double v0 = values_[i - 1], v1 = values_[i];
        if (std::fabs(v1 - v0) < 1e-14 * std::max(1.0, v0)) {
          total += std::pow(v0, p) * w;
        } else {
          total += (std::pow(v1, p + 1.0) - std::pow(v0, p + 1.0)) / ((v1 - v0) / w * (p + 1.0));
        }
      }
      return total;
    }
  }
  return 1.0;
}

double ShapeFunction::integrate_against(const std::function<double(double)>& g) const {
  // ∫ h g dλ = ∫_0^1 g(H^{-1}(u)) du; the substitution absorbs any endpoint
  // singularity of h.
  return integrate([&](double u) { return g(quantile(u)); }, 0.0, 1.0,
                   QuadOptions{1e-11, 1e-11, 0.0, 4000});
}

ShapeFunction::LevelSet ShapeFunction::superlevel(double c) const {
  LevelSet out{0.0, 0.0, 0.0};
  if (c < 0.0) c = 0.0;
  switch (kind_) {
    case ShapeKind::Constant:
      if (c < 1.0) {
        out = {1.0, 1.0, 0.0};
      } else {
        out = {0.0, 0.0, 1.0};
      }
      return out;
    case ShapeKind::PowerLaw: {
      if (a_ == 0.0) {
        if (c < 1.0) return {1.0, 1.0, 0.0};
        return {0.0, 0.0, 1.0};
      }
      // h decreasing with range ((1-a), inf): crossing at x* = ((1-a)/c)^{1/a}
      if (c <= 1.0 - a_) return {1.0, 1.0, 0.0};
      double xs = std::pow((1.0 - a_) / c, 1.0 / a_);
      out.measure = xs;
      out.h_mass = std::pow(xs, 1.0 - a_);
      if (a_ == 0.5) {
        out.h2_sublevel = 0.25 * std::log(1.0 / xs);
      } else {
        out.h2_sublevel = (1.0 - a_) * (1.0 - a_) *
                          (1.0 - std::pow(xs, 1.0 - 2.0 * a_)) / (1.0 - 2.0 * a_);
      }
      return out;
    }
    case ShapeKind::Linear2x: {
      double xs = std::min(1.0, 0.5 * c);  // h > c for x > c/2
      out.measure = 1.0 - xs;
      out.h_mass = 1.0 - xs * xs;
      out.h2_sublevel = 4.0 * xs * xs * xs / 3.0;
      return out;
    }
    case ShapeKind::Tabulated: {
      for (std::size_t i = 1; i < grid_.size(); ++i) {
        double x0 = grid_[i - 1], w = grid_[i] - x0;
        double v0 = values_[i - 1], v1 = values_[i];
        double s = (v1 - v0) / w;
        // split [0,w] into the part with h > c and the part with h <= c
        auto accum = [&](double lo, double hi, bool above) {
          if (hi <= lo) return;
          double vlo = v0 + s * lo, vhi = v0 + s * hi;
          double seg_mass = 0.5 * (vlo + vhi) * (hi - lo);
          double seg_l2 = l2_cell(vlo, s, hi - lo);
          if (above) {
            out.measure += hi - lo;
            out.h_mass += seg_mass;
          } else {
            out.h2_sublevel += seg_l2;
          }
        };
        if (std::fabs(s) < 1e-14) {
          accum(0.0, w, v0 > c);
        } else {
          double tc = (c - v0) / s;  // crossing in cell coordinates
          if (tc <= 0.0) {
            accum(0.0, w, s > 0.0 ? v1 > c : v0 > c);
          } else if (tc >= w) {
            accum(0.0, w, v0 > c);
          } else if (s > 0.0) {
            accum(0.0, tc, false);
            accum(tc, w, true);
          } else {
            accum(0.0, tc, true);
            accum(tc, w, false);
          }
        }
      }
      return out;
    }
  }
  return out;
}

std::string ShapeFunction::label() const {
  switch (kind_) {
    case ShapeKind::Constant:
      return "const";
    case ShapeKind::PowerLaw:
      return "powerlaw(" + std::to_string(a_) + ")";
    case ShapeKind::Linear2x:
      return "linear2x";
    case ShapeKind::Tabulated:
      return "tabulated[" + std::to_string(grid_.size()) + "]";
  }
  return "?";
}

}  // namespace sigdetect
