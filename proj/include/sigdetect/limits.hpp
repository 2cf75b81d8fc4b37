// limits.hpp - infinitely divisible limit laws of the LLR statistic.
//
// A nondegenerate limit of T_n is characterized by a Levy-Khintchine triple
// (gamma, sigma^2, eta) with eta concentrated on (0,inf), plus (on the
// alternative side) a defect mass M({inf}): with probability 1-exp(-M(inf))
// the alternative limit is +inf. The null and alternative triples are coupled
// by d eta_2 / d eta_1 = e^x, equal Gaussian variances, and the printed drift
// identities.
#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "sigdetect/extreal.hpp"
#include "sigdetect/rng.hpp"
#include "sigdetect/shape.hpp"

namespace sigdetect {

struct Atom {
  double x = 0.0;
  double weight = 0.0;
};

/// Continuous part of a jump measure, given by a Lebesgue density on
/// (support_lo, tail_cut); mass beyond tail_cut must be negligible (< 1e-14).
struct JumpDensity {
  std::function<double(double)> pdf;
  double support_lo = 0.0;
  double tail_cut = 60.0;
};

/// Pushforward part: the image under `map` of the measure on (0,1) with
/// density `u_density` (total mass = weight). `draw_u` samples that density.
struct JumpPushforward {
  std::function<double(double)> map;
  std::function<double(double)> u_density;
  std::function<double(Stream&)> draw_u;
  double weight = 1.0;
};

class JumpMeasure {
 public:
  std::vector<Atom> atoms;
  std::optional<JumpDensity> density;
  std::optional<JumpPushforward> pushforward;

  bool empty() const { return atoms.empty() && !density && !pushforward; }

  /// ∫ f dη over (lo, inf); max_panel > 0 keeps oscillatory f resolved on the
  /// density part.
  double integrate(const std::function<double(double)>& f, double lo,
                   double max_panel = 0.0) const;
  std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                         double lo, double max_panel) const;

  double tail_mass(double x) const;  // η(x, inf)
  double total_mass() const { return tail_mass(0.0); }
};

struct LevyTriple {
  double gamma = 0.0;
  double sigma2 = 0.0;
  JumpMeasure jumps;
  double mass_at_inf = 0.0;  // M({inf}); alternative side only
};

struct LimitPair {
  LevyTriple null_side;
  LevyTriple alt_side;
  bool fully_informative = false;  // null == -inf, alt == +inf a.s.
};

enum class Side { Null, Alt };

/// Drift parameters from the jump measure: gamma_1 closes the contiguity
/// identity E exp(xi_1) = exp(-mass_at_inf), gamma_2 is the coupled
/// alternative drift. Small-jump integrals start at `floor` (they are finite
/// as floor -> 0 for every valid Levy measure; the floor guards the shipped
/// borderline density a = 1/2 whose x^2-integral diverges at 0).
std::pair<double, double> gamma_from_eta(const JumpMeasure& eta, double sigma2,
                                         double mass_at_inf, double floor = 1e-8);

/// eta_2 = e^x eta_1.
JumpMeasure tilt_jumps(const JumpMeasure& eta1);

LimitPair gaussian_pair(double sigma2);

/// Gaussian boundary limit of the chimeric family: sigma^2 = K ∫ h^2.
LimitPair triple_chimeric_boundary(double K, const ShapeFunction& h);

/// Boundary limit for the power-law shape h(x) = (1-a) x^{-a}, a in [1/2, 1):
/// eta_1 density ((1-a)^{1/a}/a) e^x (e^x-1)^{-1/a-1}, sigma^2 = 0.
LimitPair triple_powerlaw_boundary(double a);

/// Quadratic-boundary limit of the heteroscedastic normal mixture (cases
/// (II)/(IV)): eta_1 density (1/c1)(e^x-1)^{c2-3} e^x.
LimitPair triple_normal_quadratic(double beta, double sigma0);

/// Extreme case beta = 1 for the chimeric family with kappa = n^-r.
LimitPair triple_beta1(const ShapeFunction& h, double r);

/// Extreme case beta = 1 for the normal mixture.
LimitPair triple_normal_beta1(double r);

/// Lebesgue-decomposition shift (violated absolute continuity): null shifts by
/// -c; the alternative additionally gains mass 1 - e^-c at +inf. c = +inf
/// yields the fully informative pair.
LimitPair lebesgue_shift(const LimitPair& pair, double c);

struct SamplerOptions {
  double cutoff = 1e-4;             // requested small-jump cutoff
  double max_expected_jumps = 512;  // cutoff is raised until lambda <= this
  double inner_floor = 1e-8;        // lower limit of small-jump moment integrals
  int table_cells = 8192;
};

/// Effective small-jump cutoff after the jump-budget cap.
double effective_cutoff(const LevyTriple& t, const SamplerOptions& opts = {});

/// Characteristic function of the triple's law with jumps below the effective
/// cutoff absorbed into the Gaussian part (mean-compensated, variance folded
/// in). This matches LimitSampler::draw exactly; for valid triples the
/// absorption error is O(t^3 ∫_0^cutoff x^3 dη).
std::complex<double> cf_eval(const LevyTriple& t, double tval,
                             const SamplerOptions& opts = {});

/// Draws from the law of a LevyTriple (or a LimitPair side, including the
/// +inf defect on the alternative). Construction precomputes the jump table.
class LimitSampler {
 public:
  explicit LimitSampler(const LevyTriple& t, const SamplerOptions& opts = {});
  ExtReal draw(Stream& stream) const;
  double lambda() const { return lambda_; }
  double cutoff() const { return cutoff_; }

  /// One jump from the table part of the measure, normalized to a probability
  /// law on [cutoff, tail_cut]; exposes the inverse-CDF machinery for
  /// distributional checks against closed-form jump laws.
  double draw_table_jump(Stream& stream) const;

 private:
  double p_inf_ = 0.0;
  double drift_ = 0.0;
  double gauss_sd_ = 0.0;
  double lambda_ = 0.0;  // expected number of table jumps per draw
  double cutoff_ = 0.0;
  std::vector<double> cell_x_;    // table cell edges
  std::vector<double> cell_cum_;  // cumulative probability at cell edges
  std::vector<double> cell_pdf_;  // density at cell edges (for trapezoid draw)
  std::vector<Atom> atoms_;
  std::optional<JumpPushforward> push_;
  double push_weight_ = 0.0;
};

/// Convenience wrapper: one draw from the requested side of the pair.
ExtReal sample_limit(const LimitPair& pair, Side side, Stream& stream,
                     const SamplerOptions& opts = {});

}  // namespace sigdetect
