#include "fluorospec/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fluorospec/version.hpp"

namespace fluorospec::io {

namespace fs = std::filesystem;

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.good()) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[64];
  // Shortest representation that round-trips; keeps repeated runs byte-identical.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

std::string spectrum_table(const spectrum::SpectrumResult& res, cli::OutFormat format) {
  std::ostringstream out;
  const bool has_err = !res.stderrs.empty();
  if (format == cli::OutFormat::csv) {
    out << "mu,s_inel,stderr\n";
    for (std::size_t i = 0; i < res.mu.size(); ++i) {
      out << format_double(res.mu[i]) << ',' << format_double(res.s_inel[i]) << ',';
      if (has_err) out << format_double(res.stderrs[i]);
      out << '\n';
    }
  } else {
    for (std::size_t i = 0; i < res.mu.size(); ++i) {
      out << "{\"mu\": " << format_double(res.mu[i]) << ", \"s_inel\": "
          << format_double(res.s_inel[i]);
      if (has_err) out << ", \"stderr\": " << format_double(res.stderrs[i]);
      out << "}\n";
    }
  }
  return out.str();
}

std::string spectrum_metadata(const cli::RunConfig& cfg, const spectrum::SpectrumResult& res) {
  std::ostringstream out;
  out << "# fluorospec run metadata\n";
  out << "version = " << kVersion << "\n";
  if (!cfg.preset.empty()) out << "preset = " << cfg.preset << "\n";
  out << cli::render_config(cfg);
  const char* prov = res.provenance == spectrum::Provenance::analytic     ? "analytic"
                     : res.provenance == spectrum::Provenance::autocorr   ? "autocorr"
                                                                          : "monte_carlo";
  out << "provenance = " << prov << "\n";
  out << "elastic_mean = " << format_double(res.elastic_mean) << "\n";
  out << "elastic_weight = " << format_double(res.elastic_weight) << "\n";
  out << "elastic_convention = S_el(mu) = 2*pi*m^2 * delta(mu)\n";
  out << "alpha0_abs = " << format_double(cfg.params.alpha0_abs()) << "\n";
  return out.str();
}

std::string ensemble_table(const traj::TrajectoryEnsemble& ens, cli::OutFormat format) {
  std::ostringstream out;
  const bool weights = !ens.weights.empty();
  const bool states = !ens.states.empty();
  if (format == cli::OutFormat::csv) {
    out << "time,traj,i1,i2";
    if (weights) out << ",weight";
    if (states) out << ",x,y,z";
    out << '\n';
  }
  for (int traj = 0; traj < ens.n_traj(); ++traj) {
    for (int k = 0; k < ens.n_rec(); ++k) {
      if (format == cli::OutFormat::csv) {
        out << format_double(ens.times[k]) << ',' << traj << ','
            << format_double(ens.i1[traj][k]) << ',' << format_double(ens.i2[traj][k]);
        if (weights) out << ',' << format_double(ens.weights[traj][k]);
        if (states) {
          const auto& s = ens.states[traj][k];
          out << ',' << format_double(s[1]) << ',' << format_double(s[2]) << ','
              << format_double(s[3]);
        }
        out << '\n';
      } else {
        out << "{\"time\": " << format_double(ens.times[k]) << ", \"traj\": " << traj
            << ", \"i1\": " << format_double(ens.i1[traj][k])
            << ", \"i2\": " << format_double(ens.i2[traj][k]);
        if (weights) out << ", \"weight\": " << format_double(ens.weights[traj][k]);
        if (states) {
          const auto& s = ens.states[traj][k];
          out << ", \"x\": " << format_double(s[1]) << ", \"y\": " << format_double(s[2])
              << ", \"z\": " << format_double(s[3]);
        }
        out << "}\n";
      }
    }
  }
  return out.str();
}

std::string autocorr_table(const std::vector<double>& lags, const std::vector<double>& analytic,
                           const std::vector<double>* empirical, const std::vector<double>* stderrs,
                           cli::OutFormat format) {
  std::ostringstream out;
  if (format == cli::OutFormat::csv) {
    out << "lag,autocov";
    if (empirical) out << ",empirical,stderr";
    out << '\n';
    for (std::size_t i = 0; i < lags.size(); ++i) {
      out << format_double(lags[i]) << ',' << format_double(analytic[i]);
      if (empirical) out << ',' << format_double((*empirical)[i]) << ',' << format_double((*stderrs)[i]);
      out << '\n';
    }
  } else {
    for (std::size_t i = 0; i < lags.size(); ++i) {
      out << "{\"lag\": " << format_double(lags[i]) << ", \"autocov\": "
          << format_double(analytic[i]);
      if (empirical)
        out << ", \"empirical\": " << format_double((*empirical)[i])
            << ", \"stderr\": " << format_double((*stderrs)[i]);
      out << "}\n";
    }
  }
  return out.str();
}

}  // namespace fluorospec::io
