#pragma once

#include <string>

#include "dphase/config.hpp"
#include "dphase/continuation.hpp"
#include "dphase/grid.hpp"
#include "dphase/report.hpp"
#include "dphase/weights.hpp"

namespace dphase {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitCertificateFailed = 2,
  kExitNoConvergence = 3,
};

/// constant: scale. gaussian_bump: scale exp(-|x - center|^2 / sigma^2).
/// checker: +-scale on a blocks^n checkerboard over the bounding box.
/// Values are set on every node; only interior nodes enter the load.
ScalarField make_rhs(RhsPreset preset, double scale, double sigma, int blocks, const GridPtr& grid);
ScalarField make_rhs(const RunConfig& config, const GridPtr& grid);

WeightField make_weight(const RunConfig& config, const GridPtr& grid);
ContinuationConfig continuation_config(const RunConfig& config);

/// Sweep worker count: DPHASE_THREADS when it is a positive integer, else the
/// hardware concurrency; never more than `jobs`.
int sweep_workers(int jobs);

/// "dir/out.csv" -> "dir/out_3.csv"
std::string indexed_path(const std::string& path, std::size_t index);

/// Executes the configured mode and writes the requested files. Never throws
/// for bad input; failures are reported through exit_code and message.
RunSummary run(const RunConfig& config);

}  // namespace dphase
