// dphase <config-path> [--override key=value ...]

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dphase/config.hpp"
#include "dphase/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Double-phase Dirichlet solver with p -> 1 continuation"};
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("config", config_path, "flat key = value config file")->required();
  app.add_option("--override,-o", overrides, "replace a config entry, key=value")->allow_extra_args(false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dphase::kExitConfig;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "dphase: cannot read '" << config_path << "'\n";
    return dphase::kExitConfig;
  }
  std::ostringstream text;
  text << in.rdbuf();

  dphase::RunConfig config;
  try {
    config = dphase::parse_config(text.str(), overrides);
  } catch (const dphase::ConfigError& e) {
    std::cerr << "dphase: " << config_path << ": " << e.what() << '\n';
    return dphase::kExitConfig;
  }

  const auto summary = dphase::run(config);
  std::printf("mode %s: %s\n", std::string(dphase::to_string(config.mode)).c_str(), summary.message.c_str());
  if (summary.certificate) {
    const auto& c = *summary.certificate;
    std::printf("  flux_sup %.6g  pairing %.6g  residual %.3g  theta0_cauchy %d  smallness %.6g  eps_sens %.3g\n",
                c.flux_sup_final, c.pairing_ratio_final, c.residual_final, c.theta0_cauchy ? 1 : 0,
                c.smallness_lhs, c.eps_sensitivity);
  }
  for (std::size_t i = 0; i < summary.runs.size(); ++i)
    std::printf("  run %zu: exit %d, %s\n", i, summary.runs[i].exit_code, summary.runs[i].message.c_str());
  std::printf("wall time %.3f s, exit %d\n", summary.wall_seconds, summary.exit_code);
  return summary.exit_code;
}
