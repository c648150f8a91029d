#include "fluorospec/control_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fluorospec/errors.hpp"
#include "fluorospec/spectrum.hpp"

namespace fluorospec::opt {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

const unsigned kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

struct Evaluator {
  const model::PhysParams& base;
  const std::vector<FreeParam>& free_params;
  const ObjectiveSpec& spec;
  std::vector<std::pair<std::vector<double>, double>>* trace;
  int evaluations = 0;

  // Maps scaled coordinates to parameter values: projection onto the box for
  // plain parameters, periodic wrapping for angles (objectives are 2pi-periodic
  // in every angle).
  std::vector<double> decode(const std::vector<double>& s) const {
    std::vector<double> vals(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const FreeParam& fp = free_params[i];
      double v = fp.lo + s[i] * (fp.hi - fp.lo);
      if (model::is_angle_param(fp.name)) {
        v = std::remainder(v, 2.0 * kPi);
      } else {
        v = std::clamp(v, fp.lo, fp.hi);
      }
      vals[i] = v;
    }
    return vals;
  }

  model::PhysParams apply(const std::vector<double>& vals) const {
    model::PhysParams p = base;
    for (std::size_t i = 0; i < vals.size(); ++i) model::set_param(p, free_params[i].name, vals[i]);
    return p;
  }

  double operator()(const std::vector<double>& s) {
    ++evaluations;
    const std::vector<double> vals = decode(s);
    double value = kInf;
    try {
      const model::PhysParams p = apply(vals);
      if (p.alpha1_sq() + p.alpha2_sq() <= 1.0 + 1e-12) value = objective(p, spec);
    } catch (const std::exception&) {
      value = kInf;  // rejected point; the simplex moves away from it
    }
    if (trace) trace->emplace_back(vals, value);
    return value;
  }
};

struct NmOutcome {
  std::vector<double> best_s;
  double best_value = kInf;
  bool converged = false;
};

NmOutcome nelder_mead(Evaluator& eval, const std::vector<double>& start, int budget, double tol) {
  const std::size_t d = start.size();
  struct Vertex {
    std::vector<double> s;
    double f;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(d + 1);
  simplex.push_back({start, eval(start)});
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> s = start;
    s[i] += (s[i] + 0.1 <= 1.0) ? 0.1 : -0.1;
    simplex.push_back({s, eval(s)});
  }
  int used = static_cast<int>(d) + 1;

  auto order = [&] {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto diameter = [&] {
    double dmax = 0.0;
    for (std::size_t v = 1; v < simplex.size(); ++v)
      for (std::size_t i = 0; i < d; ++i)
        dmax = std::max(dmax, std::abs(simplex[v].s[i] - simplex[0].s[i]));
    return dmax;
  };

  order();
  NmOutcome out;
  while (used < budget) {
    if (diameter() < tol) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(d, 0.0);
    for (std::size_t v = 0; v < d; ++v)
      for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[v].s[i] / d;

    auto point = [&](double coeff) {
      std::vector<double> s(d);
      for (std::size_t i = 0; i < d; ++i)
        s[i] = centroid[i] + coeff * (centroid[i] - simplex[d].s[i]);
      return s;
    };

    const std::vector<double> refl = point(1.0);
    const double f_refl = eval(refl);
    ++used;
    if (f_refl < simplex[0].f) {
      const std::vector<double> exp_pt = point(2.0);
      const double f_exp = eval(exp_pt);
      ++used;
      simplex[d] = f_exp < f_refl ? Vertex{exp_pt, f_exp} : Vertex{refl, f_refl};
    } else if (f_refl < simplex[d - 1].f) {
      simplex[d] = {refl, f_refl};
    } else {
      const std::vector<double> contr = point(f_refl < simplex[d].f ? 0.5 : -0.5);
      const double f_contr = eval(contr);
      ++used;
      if (f_contr < std::min(f_refl, simplex[d].f)) {
        simplex[d] = {contr, f_contr};
      } else {
        for (std::size_t v = 1; v <= d; ++v) {
          for (std::size_t i = 0; i < d; ++i)
            simplex[v].s[i] = 0.5 * (simplex[v].s[i] + simplex[0].s[i]);
          simplex[v].f = eval(simplex[v].s);
          ++used;
        }
      }
    }
    order();
  }
  out.best_s = simplex[0].s;
  out.best_value = simplex[0].f;
  return out;
}
}  // namespace

void ObjectiveSpec::check() const {
  if (kind == ObjectiveKind::value_at_mu && !std::isfinite(mu_target))
    throw ValidationError("ObjectiveSpec: mu_target must be finite");
  if (kind == ObjectiveKind::min_over_window) {
    if (!(window_hi > window_lo)) throw ValidationError("ObjectiveSpec: empty window");
    if (window_points < 2) throw ValidationError("ObjectiveSpec: window resolution must be > 0");
  }
}

double objective(const model::PhysParams& p, const ObjectiveSpec& spec) {
  spec.check();
  switch (spec.kind) {
    case ObjectiveKind::value_at_mu:
      return spectrum::s_inel(p, spec.mu_target);
    case ObjectiveKind::min_over_window:
      return spectrum::squeezing_report(p, linspace(spec.window_lo, spec.window_hi, spec.window_points))
          .min_value;
    case ObjectiveKind::fwhm:
      return spectrum::fwhm(p);
  }
  throw std::logic_error("objective: unknown kind");
}

OptimResult optimize(const model::PhysParams& base, const std::vector<FreeParam>& free_params,
                     const ObjectiveSpec& spec, const OptimOptions& opts) {
  spec.check();
  if (free_params.empty()) throw std::invalid_argument("optimize: free parameter set is empty");
  if (opts.budget_per_restart < 50)
    throw std::invalid_argument("optimize: budget must allow >= 50 evaluations per restart");
  if (opts.restarts < 1) throw std::invalid_argument("optimize: need at least one restart");
  if (free_params.size() > 8) throw std::invalid_argument("optimize: too many free parameters");
  for (const auto& fp : free_params) {
    if (!std::isfinite(fp.lo) || !std::isfinite(fp.hi) || !(fp.hi > fp.lo))
      throw ValidationError("optimize: bounds must be finite with hi > lo");
    if (!opts.allow_alpha && (fp.name == "alpha1_sq" || fp.name == "alpha2_sq"))
      throw std::invalid_argument(
          "optimize: channel fractions describe the apparatus; pass allow_alpha to free them");
    model::get_param(base, fp.name);  // validates the name
  }

  OptimResult res;
  Evaluator eval{base, free_params, spec, &res.trace};

  const std::size_t d = free_params.size();
  double best = kInf;
  std::vector<double> best_s;
  bool best_converged = false;
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<double> start(d);
    for (std::size_t i = 0; i < d; ++i)
      start[i] = halton(opts.seed + static_cast<std::uint64_t>(r) + 1, kHaltonBases[i]);
    const NmOutcome out = nelder_mead(eval, start, opts.budget_per_restart, opts.simplex_tol);
    ++res.restarts_used;
    if (out.best_value < best) {
      best = out.best_value;
      best_s = out.best_s;
      best_converged = out.converged;
    }
  }

  res.evaluations = eval.evaluations;
  res.converged = best_converged;
  if (best_s.empty()) throw ValidationError("optimize: no evaluation succeeded");
  res.best_params = eval.apply(eval.decode(best_s));
  res.best_value = objective(res.best_params, spec);
  return res;
}

GridScanResult grid_scan(const model::PhysParams& base, const std::vector<GridAxis>& axes,
                         const ObjectiveSpec& spec) {
  spec.check();
  if (axes.empty() || axes.size() > 2)
    throw std::invalid_argument("grid_scan: one or two axes supported");
  long long total = 1;
  GridScanResult res;
  res.axes = axes;
  for (const auto& ax : axes) {
    if (ax.count < 1) throw ValidationError("grid_scan: axis count must be >= 1");
    model::get_param(base, ax.name);
    total *= ax.count;
    res.grids.push_back(linspace(ax.lo, ax.hi, ax.count));
  }
  if (total > 1000000) throw ValidationError("grid_scan: more than 1e6 points requested");

  res.values.reserve(total);
  auto eval_at = [&](const std::vector<double>& vals) {
    model::PhysParams p = base;
    for (std::size_t i = 0; i < vals.size(); ++i) model::set_param(p, axes[i].name, vals[i]);
    try {
      if (p.alpha1_sq() + p.alpha2_sq() > 1.0 + 1e-12) return kInf;
      return objective(p, spec);
    } catch (const std::exception&) {
      return kInf;
    }
  };
  if (axes.size() == 1) {
    for (double v : res.grids[0]) res.values.push_back(eval_at({v}));
  } else {
    for (double v0 : res.grids[0])
      for (double v1 : res.grids[1]) res.values.push_back(eval_at({v0, v1}));
  }
  return res;
}

}  // namespace fluorospec::opt
