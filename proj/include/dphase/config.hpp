#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dphase/grid.hpp"
#include "dphase/weights.hpp"

namespace dphase {

enum class Mode { solve, continuation, check_weight, sweep };
Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

enum class RhsPreset { constant, gaussian_bump, checker };
RhsPreset parse_rhs_preset(std::string_view name);
std::string_view to_string(RhsPreset preset);

class ConfigError : public std::runtime_error {
public:
  enum class Kind { missing_key, bad_value, unknown_key, syntax };

  ConfigError(Kind kind, std::string key, int line, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  const std::string& key() const noexcept { return key_; }
  /// 1-based source line, 0 for overrides and missing keys.
  int line() const noexcept { return line_; }

private:
  Kind kind_;
  std::string key_;
  int line_;
};

struct RunConfig {
  Mode mode = Mode::continuation;

  int dim = 2;
  Shape shape = Shape::square;
  int resolution = 64;

  WeightPreset weight_preset = WeightPreset::constant;
  double weight_c = 1.0;
  double weight_k = 4.0;
  double weight_r0 = 0.25;
  double aq_floor = 1e-8;

  RhsPreset rhs_preset = RhsPreset::constant;
  double rhs_scale = 0.0;
  double rhs_sigma = 0.25;
  int rhs_blocks = 4;

  double q = 1.3;
  std::optional<double> p;
  std::optional<int> k_max;

  double epsilon0 = 1e-2;
  double solver_tol = 1e-9;
  int max_iter = 500;

  std::string csv_path;
  std::string json_path;

  bool strict_h0 = false;
  std::uint64_t seed = 1;
  /// Random-start continuation runs for the uniqueness probe; 0 disables it.
  int uniqueness_seeds = 0;

  std::string sweep_key;
  std::vector<std::string> sweep_values;

  bool operator==(const RunConfig&) const = default;

  /// Smallest p the run reaches: exponents.p or 1 + 2^{-k_max}.
  double p_min() const;
};

/// Parses the flat "dotted.key = value" format ('#' starts a comment).
/// Overrides ("key=value") replace or add entries after the text is read.
/// Throws ConfigError.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Canonical key=value text; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& config);
/// The canonical entries as an ordered key -> value map.
std::map<std::string, std::string> to_entries(const RunConfig& config);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace dphase
