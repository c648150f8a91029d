#pragma once

#include <string>

#include "fluorospec/config.hpp"
#include "fluorospec/spectrum.hpp"
#include "fluorospec/trajectories.hpp"

namespace fluorospec::io {

/// Writes to a temporary file in the target directory, then renames; no
/// partial file survives a failure.
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);  ///< shortest round-trip decimal

/// CSV header `mu,s_inel,stderr` (stderr column empty for analytic
/// provenance) or the same record as JSON lines.
std::string spectrum_table(const spectrum::SpectrumResult& res, cli::OutFormat format);

/// Key-value sidecar with all parameters, grid, convention constants, and the
/// code version; written next to the data file at `<path>.meta`.
std::string spectrum_metadata(const cli::RunConfig& cfg, const spectrum::SpectrumResult& res);

/// Columnar ensemble export: time,traj,i1,i2[,weight][,x,y,z].
std::string ensemble_table(const traj::TrajectoryEnsemble& ens, cli::OutFormat format);

std::string autocorr_table(const std::vector<double>& lags, const std::vector<double>& analytic,
                           const std::vector<double>* empirical, const std::vector<double>* stderrs,
                           cli::OutFormat format);

}  // namespace fluorospec::io
