#include "fluorospec/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fluorospec/control_opt.hpp"
#include "fluorospec/errors.hpp"
#include "fluorospec/io.hpp"
#include "fluorospec/spectrum.hpp"
#include "fluorospec/version.hpp"

namespace fluorospec::cli {

namespace {
constexpr double kPi = 3.14159265358979323846;

OutFormat parse_format(const std::string& f) {
  if (f == "csv") return OutFormat::csv;
  if (f == "json-lines") return OutFormat::json_lines;
  throw ParseError("unknown format '" + f + "' (csv | json-lines)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int map_exception(const std::exception& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e))
    return kExitUsage;
  return kExitNumerical;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}
}  // namespace

RunConfig load_run_config(const CommandOptions& opts) {
  if (opts.preset_name.empty() && opts.config_path.empty())
    throw ParseError("provide --preset and/or --config");
  RunConfig cfg = opts.preset_name.empty() ? RunConfig{} : preset(opts.preset_name);
  if (!opts.config_path.empty()) cfg = parse_config(read_file(opts.config_path), cfg);
  if (opts.has_seed) cfg.sim.seed = opts.seed;
  cfg.sim.n_threads = opts.threads;
  cfg.sim.record_states = opts.record_states || cfg.sim.record_states;
  cfg.format = parse_format(opts.format);
  cfg.output_path = opts.out_path;
  for (const auto& w : cfg.params.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return cfg;
}

namespace {
std::string default_out(const RunConfig& cfg, const char* stem) {
  if (!cfg.output_path.empty()) return cfg.output_path;
  return std::string(stem) + (cfg.format == OutFormat::csv ? ".csv" : ".jsonl");
}
}  // namespace

int cmd_spectrum(const CommandOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_run_config(opts);
    const spectrum::SpectrumResult res = spectrum::s_inel_grid(cfg.params, cfg.grid.grid());
    const std::string out = default_out(cfg, "spectrum");
    io::atomic_write(out, io::spectrum_table(res, cfg.format));
    io::atomic_write(out + ".meta", io::spectrum_metadata(cfg, res));

    const auto rep = spectrum::squeezing_report(cfg.params, res.mu);
    std::printf("wrote %s (%zu rows)\n", out.c_str(), res.mu.size());
    std::printf("elastic line: m = %s, weight = %s (S_el = 2*pi*m^2*delta)\n",
                io::format_double(res.elastic_mean).c_str(),
                io::format_double(res.elastic_weight).c_str());
    std::printf("squeezing: min S_inel = %.6f at mu = %.4f, squeezed = %s\n", rep.min_value,
                rep.argmin_mu, rep.squeezed ? "true" : "false");
    return kExitOk;
  });
}

int cmd_simulate(const CommandOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_run_config(opts);
    const traj::TrajectoryEnsemble ens =
        opts.reference_measure ? traj::simulate_reference(cfg.params, cfg.sim)
                               : traj::simulate_physical(cfg.params, cfg.sim);
    const std::string out = default_out(cfg, "ensemble");
    io::atomic_write(out, io::ensemble_table(ens, cfg.format));
    std::printf("wrote %s: %d trajectories x %d samples (%s measure%s)\n", out.c_str(),
                ens.n_traj(), ens.n_rec(),
                ens.measure == traj::Measure::reference ? "reference" : "physical",
                ens.step_size_warning ? ", step-size warning" : "");
    return kExitOk;
  });
}

int cmd_mc_spectrum(const CommandOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_run_config(opts);
    const traj::TrajectoryEnsemble ens = traj::simulate_physical(cfg.params, cfg.sim);
    const spectrum::SpectrumResult res = spectrum::mc_spectrum(ens, cfg.grid.grid());
    const std::string out = default_out(cfg, "mc_spectrum");
    io::atomic_write(out, io::spectrum_table(res, cfg.format));
    io::atomic_write(out + ".meta", io::spectrum_metadata(cfg, res));
    std::printf("wrote %s (%zu bins); elastic mean estimate m = %s\n", out.c_str(), res.mu.size(),
                io::format_double(res.elastic_mean).c_str());

    if (opts.compare_analytic) {
      std::printf("%12s %12s %12s %8s\n", "mu", "mc", "analytic", "z");
      for (std::size_t i = 0; i < res.mu.size(); ++i) {
        if (std::abs(res.mu[i]) < 1e-12) {
          std::printf("%12.5f %12.5f %12s %8s  (elastic bin, excluded)\n", res.mu[i],
                      res.s_inel[i], "-", "-");
          continue;
        }
        const double ana = spectrum::s_inel(cfg.params, res.mu[i]);
        const double z = (res.s_inel[i] - ana) / res.stderrs[i];
        std::printf("%12.5f %12.5f %12.5f %8.2f\n", res.mu[i], res.s_inel[i], ana, z);
      }
    }
    return kExitOk;
  });
}

int cmd_autocorr(const CommandOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_run_config(opts);
    if (!(opts.lag_max > 0.0) || opts.lag_count < 2)
      throw ParseError("autocorr needs lag-max > 0 and lag-count >= 2");

    // Lags snap to the recorded grid so the empirical estimator can share them.
    const double dt_rec = cfg.sim.dt_record();
    const long long m_max = std::max<long long>(1, std::llround(opts.lag_max / dt_rec));
    const long long stride = std::max<long long>(1, m_max / (opts.lag_count - 1));
    std::vector<double> lags;
    for (long long m = 0; m <= m_max; m += stride) lags.push_back(m * dt_rec);

    std::vector<double> analytic(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i)
      analytic[i] = spectrum::stationary_autocovariance(cfg.params, lags[i]);
    const auto [mean, weight] = spectrum::elastic_line(cfg.params);

    const std::string out = default_out(cfg, "autocorr");
    if (opts.empirical) {
      const traj::TrajectoryEnsemble ens = traj::simulate_physical(cfg.params, cfg.sim);
      const traj::AutocorrEstimate est = traj::empirical_autocorr(ens, lags);
      io::atomic_write(out, io::autocorr_table(lags, analytic, &est.values, &est.stderrs, cfg.format));
      std::printf("wrote %s; comparison (empirical vs autocov + m^2, lag 0 carries the 1/dt spike):\n",
                  out.c_str());
      std::printf("%10s %12s %12s %8s\n", "lag", "empirical", "expected", "z");
      for (std::size_t i = 1; i < lags.size(); ++i) {
        const double expected = analytic[i] + mean * mean;
        const double z = (est.values[i] - expected) / est.stderrs[i];
        std::printf("%10.4f %12.6f %12.6f %8.2f\n", lags[i], est.values[i], expected, z);
      }
    } else {
      io::atomic_write(out, io::autocorr_table(lags, analytic, nullptr, nullptr, cfg.format));
      std::printf("wrote %s (%zu lags); stationary mean m = %s\n", out.c_str(), lags.size(),
                  io::format_double(mean).c_str());
    }
    return kExitOk;
  });
}

namespace {
opt::FreeParam parse_free_spec(const std::string& spec) {
  const std::size_t eq = spec.find('=');
  const std::size_t colon = spec.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos)
    throw ParseError("free spec must be name=lo:hi, got '" + spec + "'");
  opt::FreeParam fp;
  fp.name = spec.substr(0, eq);
  fp.lo = parse_number(spec.substr(eq + 1, colon - eq - 1));
  fp.hi = parse_number(spec.substr(colon + 1));
  return fp;
}

opt::GridAxis parse_grid_spec(const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos) throw ParseError("grid spec must be name=lo:hi:count");
  const std::string rest = spec.substr(eq + 1);
  const std::size_t c1 = rest.find(':');
  const std::size_t c2 = rest.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ParseError("grid spec must be name=lo:hi:count, got '" + spec + "'");
  opt::GridAxis ax;
  ax.name = spec.substr(0, eq);
  ax.lo = parse_number(rest.substr(0, c1));
  ax.hi = parse_number(rest.substr(c1 + 1, c2 - c1 - 1));
  ax.count = static_cast<int>(std::llround(parse_number(rest.substr(c2 + 1))));
  return ax;
}

opt::ObjectiveSpec parse_objective_spec(const std::string& spec) {
  opt::ObjectiveSpec os;
  if (spec == "fwhm") {
    os.kind = opt::ObjectiveKind::fwhm;
    return os;
  }
  if (spec.rfind("value-at-mu:", 0) == 0) {
    os.kind = opt::ObjectiveKind::value_at_mu;
    os.mu_target = parse_number(spec.substr(12));
    return os;
  }
  if (spec.rfind("min-over-window:", 0) == 0) {
    os.kind = opt::ObjectiveKind::min_over_window;
    std::string rest = spec.substr(16);
    const std::size_t c1 = rest.find(':');
    const std::size_t c2 = rest.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ParseError("objective min-over-window needs lo:hi:points");
    os.window_lo = parse_number(rest.substr(0, c1));
    os.window_hi = parse_number(rest.substr(c1 + 1, c2 - c1 - 1));
    os.window_points = static_cast<int>(std::llround(parse_number(rest.substr(c2 + 1))));
    return os;
  }
  throw ParseError("unknown objective '" + spec + "' (value-at-mu:MU | min-over-window:LO:HI:N | fwhm)");
}
}  // namespace

int cmd_optimize(const CommandOptions& opts) {
  return guarded([&]() -> int {
    const RunConfig cfg = load_run_config(opts);
    const opt::ObjectiveSpec objective = parse_objective_spec(opts.objective_spec);

    if (!opts.grid_specs.empty()) {
      std::vector<opt::GridAxis> axes;
      for (const auto& s : opts.grid_specs) axes.push_back(parse_grid_spec(s));
      const opt::GridScanResult scan = opt::grid_scan(cfg.params, axes, objective);

      std::ostringstream table;
      table << "eval_index";
      for (const auto& ax : axes) table << ',' << ax.name;
      table << ",value\n";
      std::size_t best = 0;
      for (std::size_t i = 0; i < scan.values.size(); ++i) {
        table << i;
        if (axes.size() == 1) {
          table << ',' << io::format_double(scan.grids[0][i]);
        } else {
          table << ',' << io::format_double(scan.grids[0][i / scan.grids[1].size()]) << ','
                << io::format_double(scan.grids[1][i % scan.grids[1].size()]);
        }
        table << ',' << io::format_double(scan.values[i]) << '\n';
        if (scan.values[i] < scan.values[best]) best = i;
      }
      const std::string out = default_out(cfg, "grid_scan");
      io::atomic_write(out, table.str());
      std::printf("wrote %s (%zu points); discrete argmin: index %zu, value %s\n", out.c_str(),
                  scan.values.size(), best, io::format_double(scan.values[best]).c_str());
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const double v = a == 0 ? scan.grids[0][axes.size() == 1 ? best : best / scan.grids[1].size()]
                                : scan.grids[1][best % scan.grids[1].size()];
        std::printf("  %s = %s\n", axes[a].name.c_str(), io::format_double(v).c_str());
      }
      return kExitOk;
    }

    if (opts.free_specs.empty()) throw ParseError("optimize needs --free name=lo:hi or --grid");
    std::vector<opt::FreeParam> free_params;
    for (const auto& s : opts.free_specs) free_params.push_back(parse_free_spec(s));

    opt::OptimOptions oo;
    oo.budget_per_restart = opts.budget;
    oo.restarts = opts.restarts;
    oo.seed = opts.has_seed ? opts.seed : cfg.sim.seed;
    oo.allow_alpha = opts.allow_alpha;
    const opt::OptimResult res = opt::optimize(cfg.params, free_params, objective, oo);

    std::ostringstream table;
    table << "eval_index";
    for (const auto& fp : free_params) table << ',' << fp.name;
    table << ",value\n";
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      table << i;
      for (double v : res.trace[i].first) table << ',' << io::format_double(v);
      table << ',' << io::format_double(res.trace[i].second) << '\n';
    }
    const std::string out = default_out(cfg, "optimize_trace");
    io::atomic_write(out, table.str());

    std::ostringstream report;
    report << "# fluorospec optimization report\n";
    report << "version = " << kVersion << "\n";
    report << "objective = " << opts.objective_spec << "\n";
    report << "converged = " << (res.converged ? "true" : "false") << "\n";
    report << "restarts_used = " << res.restarts_used << "\n";
    report << "evaluations = " << res.evaluations << "\n";
    report << "best_value = " << io::format_double(res.best_value) << "\n";
    for (const auto& fp : free_params)
      report << "best_" << fp.name << " = "
             << io::format_double(model::get_param(res.best_params, fp.name)) << "\n";
    io::atomic_write(out + ".meta", report.str());

    std::printf("best value %s after %d evaluations (%s)\n",
                io::format_double(res.best_value).c_str(), res.evaluations,
                res.converged ? "converged" : "budget exhausted");
    for (const auto& fp : free_params)
      std::printf("  %s = %s\n", fp.name.c_str(),
                  io::format_double(model::get_param(res.best_params, fp.name)).c_str());
    return res.converged ? kExitOk : kExitBudget;
  });
}

namespace {
model::PhysParams random_params(std::mt19937_64& eng) {
  auto uni = [&](double lo, double hi) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  model::PhysParams p;
  p.gamma = uni(0.5, 2.0);
  p.omega_rabi = uni(0.0, 3.0);
  p.delta_omega = uni(-3.0, 3.0);
  p.n_bar = uni(0.0, 1.0);
  p.k_d = uni(0.0, 0.5);
  double a1sq, a2sq;
  do {
    a1sq = uni(0.0, 1.0);
    a2sq = uni(0.0, 1.0);
  } while (a1sq + a2sq > 1.0);
  p.alpha1_abs = std::sqrt(a1sq);
  p.alpha2_abs = std::sqrt(a2sq);
  p.c = uni(-1.0, 1.0);
  p.phi = uni(0.0, kPi);
  p.theta1 = uni(-kPi, kPi);
  p.theta2 = uni(-kPi, kPi);
  return p;
}

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};
}  // namespace

int cmd_validate(const CommandOptions& opts) {
  return guarded([&]() -> int {
    const std::uint64_t seed = opts.has_seed ? opts.seed : 12345;
    std::vector<CheckResult> results;
    char detail[160];

    {
      std::mt19937_64 eng(seed);
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const model::PhysParams p = random_params(eng);
        const double diff = (model::feedback_liouvillian(p).matrix() -
                             model::feedback_liouvillian_composed(p).matrix())
                                .cwiseAbs()
                                .maxCoeff();
        worst = std::max(worst, diff);
      }
      std::snprintf(detail, sizeof detail, "max |L_f - composed| = %.2e over 100 draws (tol 1e-10)", worst);
      results.push_back({"generator-equivalence", worst <= 1e-10, detail});
    }

    {
      std::mt19937_64 eng(seed + 1);
      double worst = 0.0;
      bool ok = true;
      for (int i = 0; i < 20 && ok; ++i) {
        const model::PhysParams p = random_params(eng);
        Eigen::Matrix3d a = model::a_matrix(p);
        if (opts.corrupt_a_matrix) a(0, 0) += 0.1 * p.gamma;  // fault injection
        const Eigen::Vector3d t = model::t_vector(p);
        for (double mu : {0.0, 0.5, 2.0}) {
          const double closed =
              spectrum::s_inel_from_parts(a, t, p.theta2, p.gamma, p.alpha2_sq(), mu);
          const double fourier = spectrum::s_inel_via_autocorr(p, mu);
          worst = std::max(worst, std::abs(closed - fourier));
          if (worst > 1e-5) {
            ok = false;
            break;
          }
        }
      }
      std::snprintf(detail, sizeof detail,
                    "max |closed form - Fourier route| = %.2e over 20 draws x 3 mu (tol 1e-5)", worst);
      results.push_back({"spectrum-oracle-equivalence", worst <= 1e-5, detail});
    }

    {
      std::mt19937_64 eng(seed + 2);
      double worst = 2.0;
      for (int i = 0; i < 20; ++i) {
        const model::PhysParams p = random_params(eng);
        for (int k = 0; k <= 40; ++k)
          worst = std::min(worst, spectrum::heisenberg_product(p, -4.0 + 0.2 * k));
      }
      std::snprintf(detail, sizeof detail, "min product = %.12f over 20 draws x 41 mu (bound 1 - 1e-9)",
                    worst);
      results.push_back({"heisenberg-bound", worst >= 1.0 - 1e-9, detail});
    }

    {
      std::mt19937_64 eng(seed + 3);
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        const model::PhysParams p = random_params(eng);
        worst = std::max(worst, std::abs(spectrum::s_inel(p, 1e3 * p.gamma) - 1.0));
      }
      model::PhysParams white = random_params(eng);
      white.alpha2_abs = 0.0;
      const double flat = std::abs(spectrum::s_inel(white, 0.7) - 1.0);
      std::snprintf(detail, sizeof detail,
                    "|S(1e3 gamma) - 1| <= %.2e (tol 1e-4); |alpha2| = 0 gives |S - 1| = %.1e", worst,
                    flat);
      results.push_back({"white-noise-floor", worst <= 1e-4 && flat <= 1e-12, detail});
    }

    {
      std::mt19937_64 eng(seed + 4);
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const model::PhysParams p = random_params(eng);
        const model::BlochDrift d = model::bloch_drift(model::feedback_liouvillian(p));
        Eigen::Vector3cd ea = model::a_matrix(p).eigenvalues();
        Eigen::Vector3cd eb = (-d.b).eigenvalues();
        std::sort(ea.data(), ea.data() + 3, [](auto l, auto r) {
          return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
        });
        std::sort(eb.data(), eb.data() + 3, [](auto l, auto r) {
          return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
        });
        worst = std::max(worst, (ea - eb).cwiseAbs().maxCoeff());
      }
      std::snprintf(detail, sizeof detail,
                    "eigenvalue multiset |spec(A) - spec(-B)| = %.2e over 100 draws (tol 1e-8)", worst);
      results.push_back({"a-matrix-spectrum", worst <= 1e-8, detail});
    }

    bool all = true;
    for (const auto& r : results) {
      std::printf("%-30s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
      all = all && r.pass;
    }
    if (!all) {
      for (const auto& r : results)
        if (!r.pass) {
          std::fprintf(stderr, "FAILED: %s\n", r.name.c_str());
          break;
        }
      return kExitNumerical;
    }
    return kExitOk;
  });
}

}  // namespace fluorospec::cli
