#include "sigdetect/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sigdetect/detectability.hpp"
#include "sigdetect/special.hpp"
#include "sigdetect/statistics.hpp"

namespace sigdetect {

namespace {
constexpr std::uint64_t kNullDomain = 0xA1;
constexpr std::uint64_t kAltDomain = 0xB2;
constexpr std::uint64_t kSizeDomain = 0xC3;

double eval_statistic(const DetectionModel& m, TestKind stat, std::span<const double> obs,
                      double hc_max_t) {
  if (stat == TestKind::HC) {
    auto pv = to_pvalues(m, obs);
    return hc_statistic(pv, hc_max_t).raw;
  }
  return llr_statistic(m, obs).value;
}
}  // namespace

std::string to_string(TestKind t) {
  switch (t) {
    case TestKind::HC: return "hc";
    case TestKind::LLR: return "llr";
    case TestKind::Both: return "both";
  }
  return "?";
}

void parallel_for(long long count, int threads, const std::function<void(long long)>& fn) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<long long>(workers, count));
  if (workers == 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&]() {
    try {
      for (;;) {
        long long i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(error_mu);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::pair<double, double> wilson_interval(long long x, long long n) {
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(x) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double quantile_type7(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile_type7: empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

namespace {
std::vector<double> null_statistics(const DetectionModel& m, TestKind stat, long long reps,
                                    std::uint64_t seed, int threads, double hc_max_t,
                                    std::uint64_t domain) {
  std::vector<double> out(static_cast<std::size_t>(reps));
  Stream root(seed);
  parallel_for(reps, threads, [&](long long i) {
    Stream s = root.substream(domain, static_cast<std::uint64_t>(i));
    auto obs = sample_null(m, static_cast<std::size_t>(m.n), s);
    out[static_cast<std::size_t>(i)] = eval_statistic(m, stat, obs, hc_max_t);
  });
  return out;
}
}  // namespace

double mc_critical_value(const DetectionModel& m, TestKind stat, double alpha, long long reps,
                         std::uint64_t seed, int threads, double hc_max_t) {
  if (stat == TestKind::Both)
    throw std::invalid_argument("mc_critical_value: pick one statistic");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("mc_critical_value: alpha must lie in (0,1)");
  if (reps < 100) throw std::invalid_argument("mc_critical_value: need at least 100 replications");
  auto stats = null_statistics(m, stat, reps, seed, threads, hc_max_t, kNullDomain);
  std::sort(stats.begin(), stats.end());
  return quantile_type7(stats, 1.0 - alpha);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::string repr = cfg.model.label() + "|" + to_string(cfg.test) + "|" +
                     std::to_string(cfg.alpha) + "|" + std::to_string(cfg.reps) + "|" +
                     std::to_string(cfg.critical_reps) + "|" + std::to_string(cfg.seed) + "|" +
                     std::to_string(cfg.hc_max_t);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

PowerReport estimate_power(const ExperimentConfig& cfg) {
  if (cfg.reps < 100) throw std::invalid_argument("estimate_power: need at least 100 replications");
  const bool want_hc = cfg.test == TestKind::HC || cfg.test == TestKind::Both;
  const bool want_llr = cfg.test == TestKind::LLR || cfg.test == TestKind::Both;
  const long long crit_reps = cfg.critical_reps > 0 ? cfg.critical_reps : cfg.reps;

  PowerReport report;
  double hc_crit = 0.0, llr_crit = 0.0;
  {
    // one sampling pass over the null replications serves both statistics
    std::vector<double> hc_stats(want_hc ? crit_reps : 0);
    std::vector<double> llr_stats(want_llr ? crit_reps : 0);
    Stream root(cfg.seed);
    parallel_for(crit_reps, cfg.threads, [&](long long i) {
      Stream s = root.substream(kNullDomain, static_cast<std::uint64_t>(i));
      auto obs = sample_null(cfg.model, static_cast<std::size_t>(cfg.model.n), s);
      if (want_hc) {
        auto pv = to_pvalues(cfg.model, obs);
        hc_stats[static_cast<std::size_t>(i)] = hc_statistic(pv, cfg.hc_max_t).raw;
      }
      if (want_llr)
        llr_stats[static_cast<std::size_t>(i)] = llr_statistic(cfg.model, obs).value;
    });
    if (want_hc) {
      std::sort(hc_stats.begin(), hc_stats.end());
      hc_crit = quantile_type7(hc_stats, 1.0 - cfg.alpha);
      report.hc.emplace();
      report.hc->critical = hc_crit;
      if (cfg.model.n >= 16)
        report.hc->critical_asymptotic =
            hc_asymptotic_critical(static_cast<std::size_t>(cfg.model.n), cfg.alpha);
    }
    if (want_llr) {
      KahanSum mean, sq;
      for (double v : llr_stats) mean.add(v);
      const double mu = mean.value() / static_cast<double>(llr_stats.size());
      for (double v : llr_stats) sq.add((v - mu) * (v - mu));
      report.llr_null_mean = mu;
      report.llr_null_var = sq.value() / (static_cast<double>(llr_stats.size()) - 1.0);
      std::sort(llr_stats.begin(), llr_stats.end());
      llr_crit = quantile_type7(llr_stats, 1.0 - cfg.alpha);
      report.llr.emplace();
      report.llr->critical = llr_crit;
    }
  }

  // power: alternative replications in their own stream domain
  std::vector<unsigned char> hc_rej(want_hc ? cfg.reps : 0);
  std::vector<unsigned char> llr_rej(want_llr ? cfg.reps : 0);
  Stream root(cfg.seed);
  parallel_for(cfg.reps, cfg.threads, [&](long long i) {
    Stream s = root.substream(kAltDomain, static_cast<std::uint64_t>(i));
    AltSample alt = sample_alternative(cfg.model, s);
    if (want_hc) {
      auto pv = to_pvalues(cfg.model, alt.values);
      hc_rej[static_cast<std::size_t>(i)] =
          hc_statistic(pv, cfg.hc_max_t).raw > hc_crit ? 1 : 0;
    }
    if (want_llr)
      llr_rej[static_cast<std::size_t>(i)] =
          llr_statistic(cfg.model, alt.values).value > llr_crit ? 1 : 0;
  });

  auto finish = [&](std::vector<unsigned char>& rej, TestResult& res) {
    long long count = 0;
    for (auto v : rej) count += v;
    res.power.rejections = count;
    res.power.reps = cfg.reps;
    res.power.estimate = static_cast<double>(count) / static_cast<double>(cfg.reps);
    auto [lo, hi] = wilson_interval(count, cfg.reps);
    res.power.wilson_lo = lo;
    res.power.wilson_hi = hi;
    res.power.seed = cfg.seed;
    res.power.config_hash = config_hash(cfg);
  };
  if (want_hc) finish(hc_rej, *report.hc);
  if (want_llr) finish(llr_rej, *report.llr);

  if (cfg.with_size) {
    std::vector<unsigned char> hc_s(want_hc ? cfg.reps : 0), llr_s(want_llr ? cfg.reps : 0);
    parallel_for(cfg.reps, cfg.threads, [&](long long i) {
      Stream s = root.substream(kSizeDomain, static_cast<std::uint64_t>(i));
      auto obs = sample_null(cfg.model, static_cast<std::size_t>(cfg.model.n), s);
      if (want_hc) {
        auto pv = to_pvalues(cfg.model, obs);
        hc_s[static_cast<std::size_t>(i)] =
            hc_statistic(pv, cfg.hc_max_t).raw > hc_crit ? 1 : 0;
      }
      if (want_llr)
        llr_s[static_cast<std::size_t>(i)] =
            llr_statistic(cfg.model, obs).value > llr_crit ? 1 : 0;
    });
    auto finish_size = [&](std::vector<unsigned char>& rej, TestResult& res) {
      long long count = 0;
      for (auto v : rej) count += v;
      PowerEstimate est;
      est.rejections = count;
      est.reps = cfg.reps;
      est.estimate = static_cast<double>(count) / static_cast<double>(cfg.reps);
      auto [lo, hi] = wilson_interval(count, cfg.reps);
      est.wilson_lo = lo;
      est.wilson_hi = hi;
      est.seed = cfg.seed;
      est.config_hash = config_hash(cfg);
      res.size = est;
    };
    if (want_hc) finish_size(hc_s, *report.hc);
    if (want_llr) finish_size(llr_s, *report.llr);
  }
  return report;
}

std::vector<SweepRow> phase_sweep(const DetectionModel& tmpl, std::span<const double> betas,
                                  std::span<const double> rs, const SweepConfig& cfg) {
  std::vector<double> bs(betas.begin(), betas.end());
  std::vector<double> rr(rs.begin(), rs.end());
  std::sort(bs.begin(), bs.end());
  std::sort(rr.begin(), rr.end());
  std::vector<SweepRow> rows;
  for (double beta : bs) {
    for (double r : rr) {
      DetectionModel m = tmpl;
      m.beta = beta;
      m.r = r;
      SweepRow row;
      row.beta = beta;
      row.r = r;
      row.seed = cfg.seed;
      row.reps = cfg.mc_reps;
      if (m.is_chimeric()) {
        row.family = "chimeric";
        row.shape = m.chimeric().h.label();
      } else {
        row.family = m.dense ? "normal-dense" : "normal";
        row.shape = "sigma0=" + std::to_string(m.normal_shift().sigma0);
      }
      const double bound = analytic_boundary(m);
      row.analytic_side = (r > bound + 1e-9) ? "above" : (r < bound - 1e-9) ? "below" : "on";
      row.label = to_string(classify_region(m).label);
      if (cfg.mc_reps > 0) {
        ExperimentConfig ec;
        ec.model = m;
        ec.test = TestKind::Both;
        ec.alpha = cfg.alpha;
        ec.reps = cfg.mc_reps;
        ec.seed = cfg.seed;
        ec.threads = cfg.threads;
        PowerReport rep = estimate_power(ec);
        if (rep.hc) row.hc_power = rep.hc->power.estimate;
        if (rep.llr) row.llr_power = rep.llr->power.estimate;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {
double ks_impl(std::vector<double> finite, std::size_t n_inf,
               const std::function<double(double)>& cdf) {
  const std::size_t n = finite.size() + n_inf;
  if (n == 0) throw std::invalid_argument("ecdf_and_ks: empty sample");
  std::sort(finite.begin(), finite.end());
  double d = 0.0;
  for (std::size_t i = 0; i < finite.size(); ++i) {
    const double x = finite[i];
    const double fx = cdf(x);
    const double f_left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    d = std::max(d, static_cast<double>(i + 1) / n - fx);
    d = std::max(d, f_left - static_cast<double>(i) / n);
  }
  // beyond the largest finite draw the empirical finite mass stays at
  // (n - n_inf)/n while the reference tends to its full mass
  const double top = cdf(std::numeric_limits<double>::max());
  d = std::max(d, std::fabs(top - static_cast<double>(finite.size()) / n));
  return d;
}
}  // namespace

double ecdf_and_ks(std::span<const ExtReal> draws, const std::function<double(double)>& cdf) {
  std::vector<double> finite;
  std::size_t n_inf = 0;
  finite.reserve(draws.size());
  for (const auto& d : draws) {
    if (d.is_finite())
      finite.push_back(d.value());
    else
      ++n_inf;
  }
  return ks_impl(std::move(finite), n_inf, cdf);
}

double ecdf_and_ks(std::span<const double> draws, const std::function<double(double)>& cdf) {
  return ks_impl(std::vector<double>(draws.begin(), draws.end()), 0, cdf);
}

}  // namespace sigdetect
