// sigdetect command line: detection boundaries, region classification,
// Monte Carlo critical values and power, phase-diagram sweeps, limit-law
// sampling, and efficiency tables.
#include <CLI11.hpp>

#include <algorithm>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sigdetect/acceptance.hpp"
#include "sigdetect/config.hpp"
#include "sigdetect/csvio.hpp"
#include "sigdetect/detectability.hpp"
#include "sigdetect/efficiency.hpp"
#include "sigdetect/limits.hpp"
#include "sigdetect/montecarlo.hpp"
#include "sigdetect/statistics.hpp"
#include "sigdetect/svg.hpp"

namespace {

using namespace sigdetect;

ShapeFunction parse_shape(const std::string& spec) {
  if (spec == "const") return ShapeFunction::constant();
  if (spec == "linear2x") return ShapeFunction::linear2x();
  if (spec.rfind("powerlaw:", 0) == 0)
    return ShapeFunction::power_law(std::stod(spec.substr(9)));
  throw std::invalid_argument("unknown shape '" + spec +
                              "' (expected const | linear2x | powerlaw:A)");
}

struct ModelArgs {
  std::string family = "chimeric";
  double beta = 0.75;
  double r = 0.5;
  double sigma0 = 1.0;
  double a = 0.5;
  std::string shape = "const";
  double log_e = 0.0;
  bool auto_e = false;
  long long n = 100000;
};

void add_model_flags(CLI::App* cmd, ModelArgs& args, bool with_r = true) {
  cmd->add_option("--family", args.family,
                  "chimeric | powerlaw | normal | normal-dense")
      ->check(CLI::IsMember({"chimeric", "powerlaw", "normal", "normal-dense"}));
  cmd->add_option("--beta", args.beta, "sparsity exponent");
  if (with_r) cmd->add_option("--r", args.r, "strength exponent");
  cmd->add_option("--sigma0", args.sigma0, "signal std dev (normal family)");
  cmd->add_option("--a", args.a, "power-law shape exponent");
  cmd->add_option("--shape", args.shape, "chimeric shape: const | linear2x | powerlaw:A");
  cmd->add_option("--E", args.log_e, "log-term exponent in eps_n");
  cmd->add_flag("--E-auto", args.auto_e,
                "use the boundary log-term E(beta, sigma0) for the normal family");
}

DetectionModel build_model(const ModelArgs& args) {
  if (args.family == "chimeric")
    return make_chimeric(args.n, args.beta, args.r, parse_shape(args.shape), args.log_e);
  if (args.family == "powerlaw")
    return make_chimeric(args.n, args.beta, args.r, ShapeFunction::power_law(args.a),
                         args.log_e);
  double e = args.log_e;
  if (args.auto_e) e = log_exponent_E(args.beta, args.sigma0);
  if (args.family == "normal")
    return make_normal(args.n, args.beta, args.r, args.sigma0, e, false);
  return make_normal(args.n, args.beta, args.r, args.sigma0, e, true);
}

void echo_config(const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) std::printf("# %s = %s\n", k.c_str(), v.c_str());
}

std::string fmt(double v) { return format_double(v); }

int cmd_boundary(const ModelArgs& args) {
  double rstar;
  if (args.family == "chimeric")
    rstar = boundary_chimeric(args.beta);
  else if (args.family == "powerlaw")
    rstar = boundary_powerlaw(args.beta, args.a);
  else if (args.family == "normal")
    rstar = boundary_normal_sparse(args.beta, args.sigma0);
  else
    rstar = boundary_normal_dense(args.beta);
  echo_config({{"family", args.family}, {"beta", fmt(args.beta)}});
  std::printf("%s\n", fmt(rstar).c_str());
  if (args.family == "normal")
    std::printf("# E = %s\n", fmt(log_exponent_E(args.beta, args.sigma0)).c_str());
  return 0;
}

int cmd_classify(const ModelArgs& args, double tau) {
  DetectionModel m = build_model(args);
  ClassifierConfig cfg;
  cfg.tau = tau;
  auto res = classify_region(m, cfg);
  echo_config({{"model", m.label()}, {"tau", fmt(tau)}});
  std::printf("label: %s\n", to_string(res.label).c_str());
  std::printf("slope: %s  last: %s\n", fmt(res.evidence.slope).c_str(),
              fmt(res.evidence.last).c_str());
  std::printf("%8s %22s %22s\n", "n", "I1", "I2");
  for (const auto& rep : res.evidence.grid)
    std::printf("%8lld %22s %22s\n", rep.n, fmt(rep.i1).c_str(), fmt(rep.i2).c_str());
  for (const auto& [t, lab] : res.evidence.cross_tau)
    std::printf("cross-check tau=%s: %s\n", fmt(t).c_str(), to_string(lab).c_str());
  return 0;
}

int cmd_critical(const ModelArgs& args, const std::string& test, double alpha,
                 long long reps, std::uint64_t seed, int threads) {
  DetectionModel m = build_model(args);
  TestKind kind = (test == "hc") ? TestKind::HC : TestKind::LLR;
  echo_config({{"model", m.label()},
               {"test", test},
               {"alpha", fmt(alpha)},
               {"reps", std::to_string(reps)},
               {"seed", std::to_string(seed)}});
  double crit = mc_critical_value(m, kind, alpha, reps, seed, threads);
  std::printf("critical: %s\n", fmt(crit).c_str());
  if (kind == TestKind::HC && m.n >= 16)
    std::printf("# asymptotic (diagnostic only; convergence is slow): %s\n",
                fmt(hc_asymptotic_critical(static_cast<std::size_t>(m.n), alpha)).c_str());
  return 0;
}

int cmd_power(const ModelArgs& args, const std::string& test, double alpha, long long reps,
              std::uint64_t seed, int threads, bool with_size) {
  ExperimentConfig cfg;
  cfg.model = build_model(args);
  cfg.test = (test == "hc") ? TestKind::HC : (test == "llr") ? TestKind::LLR : TestKind::Both;
  cfg.alpha = alpha;
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.with_size = with_size;
  echo_config({{"model", cfg.model.label()},
               {"test", test},
               {"alpha", fmt(alpha)},
               {"reps", std::to_string(reps)},
               {"seed", std::to_string(seed)}});
  PowerReport rep = estimate_power(cfg);
  auto print = [&](const char* name, const TestResult& res) {
    std::printf("%s critical: %s\n", name, fmt(res.critical).c_str());
    std::printf("%s power: %s  (%lld/%lld, wilson [%s, %s])\n", name,
                fmt(res.power.estimate).c_str(), res.power.rejections, res.power.reps,
                fmt(res.power.wilson_lo).c_str(), fmt(res.power.wilson_hi).c_str());
    if (res.size)
      std::printf("%s size: %s  (wilson [%s, %s])\n", name, fmt(res.size->estimate).c_str(),
                  fmt(res.size->wilson_lo).c_str(), fmt(res.size->wilson_hi).c_str());
  };
  if (rep.hc) {
    print("hc", *rep.hc);
    std::printf("# hc asymptotic critical (diagnostic): %s\n",
                fmt(rep.hc->critical_asymptotic).c_str());
  }
  if (rep.llr) {
    print("llr", *rep.llr);
    std::printf("llr null mean: %s  null variance: %s\n", fmt(rep.llr_null_mean).c_str(),
                fmt(rep.llr_null_var).c_str());
  }
  return 0;
}

int cmd_sweep(const ModelArgs& args, double beta_min, double beta_max, int beta_steps,
              double r_min, double r_max, int r_steps, long long mc_reps, double alpha,
              std::uint64_t seed, int threads, const std::string& out) {
  // family template; the grid overwrites beta and r per point
  ModelArgs seed_args = args;
  seed_args.beta = (args.family == "normal-dense") ? 0.25 : 0.75;
  seed_args.r = 0.5;
  DetectionModel tmpl = build_model(seed_args);
  std::vector<double> betas, rs;
  for (int i = 0; i < beta_steps; ++i)
    betas.push_back(beta_steps == 1
                        ? beta_min
                        : beta_min + (beta_max - beta_min) * i / (beta_steps - 1));
  for (int i = 0; i < r_steps; ++i)
    rs.push_back(r_steps == 1 ? r_min : r_min + (r_max - r_min) * i / (r_steps - 1));
  SweepConfig cfg;
  cfg.mc_reps = mc_reps;
  cfg.alpha = alpha;
  cfg.seed = seed;
  cfg.threads = threads;
  echo_config({{"family", args.family},
               {"beta_grid", std::to_string(beta_steps)},
               {"r_grid", std::to_string(r_steps)},
               {"mc_reps", std::to_string(mc_reps)},
               {"seed", std::to_string(seed)},
               {"out", out}});
  auto rows = phase_sweep(tmpl, betas, rs, cfg);
  write_csv(rows, out + ".csv");
  // boundary polyline across the sweep range
  std::vector<std::pair<double, double>> boundary;
  for (int i = 0; i <= 100; ++i) {
    double b = beta_min + (beta_max - beta_min) * i / 100.0;
    try {
      DetectionModel probe = tmpl;
      probe.beta = b;
      boundary.emplace_back(b, analytic_boundary(probe));
    } catch (const std::exception&) {
      // outside the family's admissible beta range
    }
  }
  if (!rows.empty()) write_svg_phase(rows, boundary, out + ".svg");
  std::printf("wrote %s.csv (%zu rows) and %s.svg\n", out.c_str(), rows.size(), out.c_str());
  return 0;
}

int cmd_limits(const std::string& triple, double a, double beta, double sigma0, double K,
               const std::string& shape, double r, const std::string& side_name,
               long long count, std::uint64_t seed, int threads, const std::string& out) {
  LimitPair pair;
  if (triple == "powerlaw")
    pair = triple_powerlaw_boundary(a);
  else if (triple == "normal-quad")
    pair = triple_normal_quadratic(beta, sigma0);
  else if (triple == "chimeric")
    pair = triple_chimeric_boundary(K, parse_shape(shape));
  else if (triple == "beta1")
    pair = triple_beta1(parse_shape(shape), r);
  else if (triple == "normal-beta1")
    pair = triple_normal_beta1(r);
  else
    throw std::invalid_argument("unknown triple '" + triple + "'");
  Side side = (side_name == "alt") ? Side::Alt : Side::Null;
  const LevyTriple& t = (side == Side::Alt) ? pair.alt_side : pair.null_side;
  echo_config({{"triple", triple},
               {"side", side_name},
               {"count", std::to_string(count)},
               {"seed", std::to_string(seed)}});
  LimitSampler sampler(t);
  std::vector<ExtReal> draws;
  draws.reserve(static_cast<std::size_t>(count));
  std::vector<ExtReal> buf(static_cast<std::size_t>(count), ExtReal::finite(0.0));
  Stream root(seed);
  parallel_for(count, threads, [&](long long i) {
    Stream s = root.substream(11, static_cast<std::uint64_t>(i));
    buf[static_cast<std::size_t>(i)] = sampler.draw(s);
  });
  long long n_inf = 0;
  std::vector<double> finite;
  for (const auto& d : buf) {
    if (d.is_finite())
      finite.push_back(d.value());
    else
      ++n_inf;
  }
  std::sort(finite.begin(), finite.end());
  // ECDF csv
  std::ofstream f(out + "_ecdf.csv", std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + out + "_ecdf.csv");
  f << "x,ecdf\n";
  std::size_t step = std::max<std::size_t>(1, finite.size() / 2000);
  for (std::size_t i = 0; i < finite.size(); i += step)
    f << format_double(finite[i]) << ","
      << format_double(static_cast<double>(i + 1) / static_cast<double>(count)) << "\n";
  f.close();
  std::printf("fraction at +inf: %s\n",
              fmt(static_cast<double>(n_inf) / static_cast<double>(count)).c_str());
  std::printf("expected 1 - exp(-M(inf)): %s\n", fmt(-std::expm1(-t.mass_at_inf)).c_str());
  std::printf("%6s %12s %12s %12s\n", "t", "|emp - cf|", "Re cf", "Im cf");
  for (double tv : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    std::complex<double> emp{0.0, 0.0};
    for (double x : finite) emp += std::complex<double>(std::cos(tv * x), std::sin(tv * x));
    emp /= static_cast<double>(finite.size());
    LevyTriple fin = t;
    fin.mass_at_inf = 0.0;
    auto ana = cf_eval(fin, tv);
    std::printf("%6.2f %12.3e %12.6f %12.6f\n", tv, std::abs(emp - ana), ana.real(),
                ana.imag());
  }
  std::printf("wrote %s_ecdf.csv (%zu finite draws)\n", out.c_str(), finite.size());
  return 0;
}

int cmd_are(const std::string& h1s, const std::string& h2s, double beta, double r,
            double beta2, double r2, double alpha) {
  auto h1 = parse_shape(h1s);
  auto h2 = parse_shape(h2s);
  if (beta2 <= 0.0) beta2 = beta;
  if (r2 <= 0.0) r2 = r;
  auto m1 = make_chimeric(100000, beta, r, h1);
  auto m2 = make_chimeric(100000, beta2, r2, h2);
  echo_config({{"h1", h1s}, {"h2", h2s}, {"beta", fmt(beta)}, {"r", fmt(r)},
               {"beta2", fmt(beta2)}, {"r2", fmt(r2)}, {"alpha", fmt(alpha)}});
  double g11 = gamma_cross(m1, m1);
  double g22 = gamma_cross(m2, m2);
  double g12 = gamma_cross(m1, m2);
  std::printf("gamma matrix:\n  [%s  %s]\n  [%s  %s]\n", fmt(g11).c_str(), fmt(g12).c_str(),
              fmt(g12).c_str(), fmt(g22).c_str());
  std::printf("ARE (n-grid): %s\n", fmt(are(m1, m2)).c_str());
  if (beta == beta2 && r == r2 && h1.l2_finite() && h2.l2_finite())
    std::printf("ARE (closed form, shared boundary): %s\n",
                fmt(are_same_boundary(h1, h2)).c_str());
  std::printf("mismatched power at alpha=%s: %s\n", fmt(alpha).c_str(),
              fmt(mismatched_power(m1, m2, alpha)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-signal detection: higher criticism vs likelihood ratio"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  // global options, overridable by --config file (key = value lines)
  std::string config_path;
  std::uint64_t seed = 1;
  long long reps = 2000;
  long long n = 100000;
  double alpha = 0.05;
  int threads = 0;
  std::string out = "sigdetect_out";
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--seed", seed, "root seed for all Monte Carlo");
  app.add_option("--reps", reps, "Monte Carlo replications");
  app.add_option("--n", n, "sample size per replication");
  app.add_option("--alpha", alpha, "nominal level");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--out", out, "output path prefix");

  ModelArgs margs;
  std::string test = "both";
  bool with_size = false;
  double tau = 1.0;

  auto* boundary_cmd = app.add_subcommand("boundary", "print the detection boundary r*(beta)");
  add_model_flags(boundary_cmd, margs, false);

  auto* classify_cmd = app.add_subcommand("classify", "I-sum region classifier");
  add_model_flags(classify_cmd, margs);
  classify_cmd->add_option("--tau", tau, "I-sum threshold");

  auto* critical_cmd = app.add_subcommand("critical", "Monte Carlo critical value");
  add_model_flags(critical_cmd, margs);
  critical_cmd->add_option("--test", test, "hc | llr")
      ->check(CLI::IsMember({"hc", "llr"}));

  auto* power_cmd = app.add_subcommand("power", "Monte Carlo power at MC criticals");
  add_model_flags(power_cmd, margs);
  power_cmd->add_option("--test", test, "hc | llr | both")
      ->check(CLI::IsMember({"hc", "llr", "both"}));
  power_cmd->add_flag("--with-size", with_size, "also estimate the size");

  double beta_min = 0.55, beta_max = 0.95, r_min = 0.1, r_max = 1.1;
  int beta_steps = 5, r_steps = 5;
  long long mc_reps = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "phase-diagram sweep to CSV + SVG");
  add_model_flags(sweep_cmd, margs, false);
  sweep_cmd->add_option("--beta-min", beta_min);
  sweep_cmd->add_option("--beta-max", beta_max);
  sweep_cmd->add_option("--beta-steps", beta_steps);
  sweep_cmd->add_option("--r-min", r_min);
  sweep_cmd->add_option("--r-max", r_max);
  sweep_cmd->add_option("--r-steps", r_steps);
  sweep_cmd->add_option("--mc-reps", mc_reps, "per-point Monte Carlo reps (0 = classify only)");

  std::string triple = "powerlaw", side_name = "null", shape2 = "const";
  double tr = 1.0, K = 1.0, ta = 0.5;
  long long count = 100000;
  auto* limits_cmd = app.add_subcommand("limits", "construct and sample a limit pair");
  limits_cmd->add_option("--triple", triple,
                         "powerlaw | normal-quad | chimeric | beta1 | normal-beta1");
  limits_cmd->add_option("--a", ta, "power-law exponent");
  limits_cmd->add_option("--beta", margs.beta);
  limits_cmd->add_option("--sigma0", margs.sigma0);
  limits_cmd->add_option("--K", K, "limit of n eps^2/kappa");
  limits_cmd->add_option("--shape", shape2, "shape for chimeric/beta1 triples");
  limits_cmd->add_option("--r", tr, "strength exponent for beta1 triples");
  limits_cmd->add_option("--side", side_name)->check(CLI::IsMember({"null", "alt"}));
  limits_cmd->add_option("--count", count, "number of draws");

  std::string h1s = "const", h2s = "linear2x";
  double beta2 = 0.0, r2 = 0.0;
  auto* are_cmd = app.add_subcommand("are", "Pitman efficiency and mismatched power");
  are_cmd->add_option("--h1", h1s);
  are_cmd->add_option("--h2", h2s);
  are_cmd->add_option("--beta", margs.beta);
  are_cmd->add_option("--r", margs.r);
  are_cmd->add_option("--beta2", beta2);
  are_cmd->add_option("--r2", r2);

  std::vector<int> criteria;
  auto* selftest_cmd = app.add_subcommand("selftest", "run the acceptance suite");
  selftest_cmd->add_option("--criterion", criteria, "criterion numbers (default: all)");

  // --config defaults are applied before CLI flags are parsed, so flags win
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    try {
      ConfigMap file = load_config(config_path);
      auto apply = [&](const std::string& key, auto& target) {
        auto it = file.find(key);
        if (it == file.end()) return;
        std::istringstream ss(it->second);
        ss >> target;
      };
      apply("seed", seed);
      apply("reps", reps);
      apply("n", n);
      apply("alpha", alpha);
      apply("threads", threads);
      apply("beta", margs.beta);
      apply("r", margs.r);
      apply("sigma0", margs.sigma0);
      apply("a", margs.a);
      auto it = file.find("family");
      if (it != file.end()) margs.family = it->second;
      it = file.find("shape");
      if (it != file.end()) margs.shape = it->second;
      it = file.find("out");
      if (it != file.end()) out = it->second;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  margs.n = n;
  try {
    if (boundary_cmd->parsed()) return cmd_boundary(margs);
    if (classify_cmd->parsed()) return cmd_classify(margs, tau);
    if (critical_cmd->parsed()) {
      if (test == "both") test = "hc";
      return cmd_critical(margs, test, alpha, reps, seed, threads);
    }
    if (power_cmd->parsed())
      return cmd_power(margs, test, alpha, reps, seed, threads, with_size);
    if (sweep_cmd->parsed())
      return cmd_sweep(margs, beta_min, beta_max, beta_steps, r_min, r_max, r_steps, mc_reps,
                       alpha, seed, threads, out);
    if (limits_cmd->parsed())
      return cmd_limits(triple, ta, margs.beta, margs.sigma0, K, shape2, tr, side_name, count,
                        seed, threads, out);
    if (are_cmd->parsed()) return cmd_are(h1s, h2s, margs.beta, margs.r, beta2, r2, alpha);
    if (selftest_cmd->parsed()) {
      AcceptanceOptions opts;
      opts.criteria = criteria;
      opts.threads = threads;
      return run_acceptance(opts) == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
