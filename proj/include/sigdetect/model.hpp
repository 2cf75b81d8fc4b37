// model.hpp - noise/signal families and the sparse mixture detection model.
//
// One DetectionModel describes a simulation scenario: n coordinates, each
// distributed as Q_n = (1 - eps_n) P0 + eps_n mu_n with eps_n = n^-beta (log n)^E.
// The signal mu_n is either "chimeric" (a shape density squeezed onto the
// shrinking support (0, kappa_n), kappa_n = n^-r, optionally perturbed) or a
// normal location/scale shift N(theta_n, sigma0^2) against N(0,1) noise.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sigdetect/rng.hpp"
#include "sigdetect/shape.hpp"

namespace sigdetect {

enum class Noise { UniformUnit, StandardNormal };

/// Signed perturbation added to the chimeric signal density; piecewise linear,
/// integrates to zero.
class Perturbation {
 public:
  static Perturbation tabulated(std::vector<double> grid, std::vector<double> values);
  double operator()(double u) const;
  double integral(double a, double b) const;  // ∫_a^b r, exact (piecewise linear)
  double l2() const { return l2_; }           // ∫ r^2
  double sup_abs() const { return sup_; }     // max |r|

 private:
  std::vector<double> grid_, values_;
  double l2_ = 0.0, sup_ = 0.0;
};

struct ChimericSignal {
  ShapeFunction h = ShapeFunction::constant();
  std::optional<Perturbation> perturbation;
};

struct NormalShiftSignal {
  double sigma0 = 1.0;
};

using SignalFamily = std::variant<ChimericSignal, NormalShiftSignal>;

/// Truncation state produced by truncate_model (Lemma-style conditioning of
/// mu on {eps * dmu/dP <= tau}); kept_mass is recomputed whenever n changes.
struct Truncation {
  double tau = 1.0;
  double kept_mass = 1.0;
};

struct DetectionModel {
  long long n = 1000;
  double beta = 0.75;
  double r = 0.5;
  double log_exponent = 0.0;  // E
  Noise noise = Noise::UniformUnit;
  SignalFamily signal = ChimericSignal{};
  bool dense = false;  // normal model with beta < 1/2, theta_n = n^-r
  std::optional<Truncation> truncation;
  // Fixed eps in [0,1) instead of n^-beta (log n)^E; eps = 0 is the null model.
  std::optional<double> epsilon_override;

  bool is_chimeric() const { return std::holds_alternative<ChimericSignal>(signal); }
  bool is_normal_shift() const { return std::holds_alternative<NormalShiftSignal>(signal); }
  const ChimericSignal& chimeric() const { return std::get<ChimericSignal>(signal); }
  const NormalShiftSignal& normal_shift() const { return std::get<NormalShiftSignal>(signal); }

  /// eps_n = n^-beta (log n)^E times the truncation kept mass. Requires n >= 3
  /// and a value in (0,1).
  double epsilon() const;

  /// Untruncated eps_n; the truncation indicator is defined in terms of it.
  double epsilon_raw() const;

  double kappa() const;  // chimeric support width n^-r
  double theta() const;  // normal shift: sqrt(2 r log n), or n^-r when dense

  /// dmu/dP0 at y (truncated version when truncation is set).
  double signal_density_ratio(double y) const;

  /// log of dmu/dP0 for the normal family, computed without overflow.
  double signal_log_ratio(double y) const;

  /// dQ/dP0 = 1 + eps (dmu/dP0 - 1); always >= 1 - eps.
  double mixture_density_ratio(double y) const;

  /// log(dQ/dP0), stable even where the signal ratio overflows a double.
  double mixture_log_ratio(double y) const;

  DetectionModel with_n(long long m) const;
  std::string label() const;
};

DetectionModel make_chimeric(long long n, double beta, double r, ShapeFunction h,
                             double log_exponent = 0.0,
                             std::optional<Perturbation> pert = std::nullopt);
DetectionModel make_normal(long long n, double beta, double r, double sigma0,
                           double log_exponent = 0.0, bool dense = false);

/// i.i.d. draws from the noise family.
std::vector<double> sample_null(const DetectionModel& m, std::size_t count, Stream& stream);

struct AltSample {
  std::vector<double> values;
  long long signal_count = 0;
};

/// One row of the alternative: each coordinate carries a signal with probability
/// eps_n. Returns the realized signal count.
AltSample sample_alternative(const DetectionModel& m, Stream& stream);

/// Transform observations to p-values (identity for uniform noise, upper-tail
/// normal probability otherwise), clamped to [1e-15, 1-1e-15].
std::vector<double> to_pvalues(const DetectionModel& m, std::span<const double> obs);

struct PerturbationReport {
  bool admissible = true;
  double value = 0.0;  // n eps^2 ∫r^2 at the model's own n
  std::vector<std::pair<long long, double>> grid;
};

/// Checks the smallness condition on the perturbation: n eps_n^2 ∫ r^2 must
/// trend to zero along the standard n-grid. l2_override substitutes per-grid
/// values of ∫ r^2 (for stress cases where the table is rescaled with n).
PerturbationReport perturbation_admissible(const DetectionModel& m,
                                           std::span<const double> l2_override = {});

/// Conditioned model of the truncation lemma: keeps the signal mass where
/// eps * dmu/dP <= tau, rescales eps by the kept mass. Zero kept mass yields
/// the flat ratio == 1 signal.
DetectionModel truncate_model(const DetectionModel& m, double tau);

/// The set {y : eps * dmu/dP0(y) > x} for the normal-shift family. The
/// log-ratio is quadratic in y, so the set is a union of at most two
/// intervals (possibly unbounded).
struct ExceedRegion {
  std::vector<std::pair<double, double>> intervals;  // endpoints may be +-inf
  double mu_probability(const DetectionModel& m) const;
  double p0_probability() const;
};
ExceedRegion normal_exceed_region(const DetectionModel& m, double x);

}  // namespace sigdetect
