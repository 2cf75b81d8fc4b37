// montecarlo.hpp - deterministic parallel Monte Carlo harness.
//
// Replication i draws from substream (seed, domain, i), so results are
// bit-identical for any worker count; aggregation is integer counting.
// Critical values and power estimates use disjoint stream domains.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigdetect/extreal.hpp"
#include "sigdetect/model.hpp"

namespace sigdetect {

enum class TestKind { HC, LLR, Both };
std::string to_string(TestKind t);

struct ExperimentConfig {
  DetectionModel model;
  TestKind test = TestKind::Both;
  double alpha = 0.05;
  long long reps = 2000;
  long long critical_reps = 0;  // 0: same as reps
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  bool with_size = false;
  double hc_max_t = 1.0;
};

struct PowerEstimate {
  long long rejections = 0;
  long long reps = 0;
  double estimate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

struct TestResult {
  double critical = 0.0;
  double critical_asymptotic = 0.0;  // HC only: the Jaeschke-based value, for diagnostics
  PowerEstimate power;
  std::optional<PowerEstimate> size;
};

struct PowerReport {
  std::optional<TestResult> hc;
  std::optional<TestResult> llr;
  double llr_null_mean = 0.0;  // over the critical-value replications
  double llr_null_var = 0.0;
};

/// Run fn(0..count-1) on a static partition over `threads` workers.
void parallel_for(long long count, int threads, const std::function<void(long long)>& fn);

/// 95% Wilson score interval for x successes out of n.
std::pair<double, double> wilson_interval(long long x, long long n);

/// Type-7 (linear interpolation) empirical quantile of a sorted sample.
double quantile_type7(std::span<const double> sorted, double q);

/// Empirical (1-alpha)-quantile of the statistic under the model's null.
double mc_critical_value(const DetectionModel& m, TestKind stat, double alpha,
                         long long reps, std::uint64_t seed, int threads = 0,
                         double hc_max_t = 1.0);

/// Monte Carlo power (and optionally size) at MC critical values.
PowerReport estimate_power(const ExperimentConfig& cfg);

struct SweepRow {
  std::string family;
  double beta = 0.0;
  double r = 0.0;
  std::string shape;  // sigma0 or shape tag
  std::string analytic_side;
  std::string label;
  std::optional<double> hc_power;
  std::optional<double> llr_power;
  long long reps = 0;
  std::uint64_t seed = 0;
};

struct SweepConfig {
  long long mc_reps = 0;  // 0: classification only, no Monte Carlo power
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Classify (and optionally power-estimate) every grid point; rows come out
/// sorted lexicographically in (beta, r).
std::vector<SweepRow> phase_sweep(const DetectionModel& tmpl, std::span<const double> betas,
                                  std::span<const double> rs, const SweepConfig& cfg);

/// One-sample Kolmogorov-Smirnov distance between draws and a reference CDF.
/// +inf-tagged draws enter through the terminal mass deficit only.
double ecdf_and_ks(std::span<const ExtReal> draws, const std::function<double(double)>& cdf);
double ecdf_and_ks(std::span<const double> draws, const std::function<double(double)>& cdf);

std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace sigdetect
