#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dphase/config.hpp"
#include "dphase/continuation.hpp"
#include "dphase/orlicz.hpp"
#include "dphase/weights.hpp"

namespace dphase {

inline constexpr const char* kCsvHeader =
    "p,lambda_p,weighted_q,flux_l1,flux_l2,flux_l4,flux_l8,flux_sup,theta0_diff_prev,pairing_ratio,residual,"
    "iterations,ratio_ok";

/// CSV body for `emit_csv`. Throws std::invalid_argument for an empty list or
/// a step lacking one of the flux exponents 1, 2, 4, 8.
std::string csv_text(const std::vector<StepDiagnostics>& steps);
/// Throws std::runtime_error when the file cannot be written.
void emit_csv(const std::vector<StepDiagnostics>& steps, const std::string& path);

struct SolveSummary {
  double p = 0.0;
  double epsilon = 0.0;
  double energy = 0.0;
  double grad_sup = 0.0;
  double residual = 0.0;
  double u_sup = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct RunSummary {
  RunConfig config;
  std::optional<H0Report> h0;
  std::optional<SmallnessResult> smallness;
  std::optional<SolveSummary> solve;
  std::vector<StepDiagnostics> steps;
  std::optional<LimitCertificate> certificate;
  std::optional<double> uniqueness_gap;
  /// Sub-runs of a sweep, in value order.
  std::vector<RunSummary> runs;
  int exit_code = 0;
  std::string message;
  /// Reported on stdout only; kept out of the JSON so that reruns are byte-identical.
  double wall_seconds = 0.0;
};

/// Pretty-printed JSON summary. The "config" object holds the canonical
/// key/value strings, so it parses back to the same RunConfig.
std::string summary_json(const RunSummary& summary);
void write_json(const RunSummary& summary, const std::string& path);

/// Rebuilds a RunConfig from the "config" object of a summary.
RunConfig config_from_summary_json(const std::string& json_text);

}  // namespace dphase
