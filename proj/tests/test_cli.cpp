#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "dphase/config.hpp"
#include "dphase/report.hpp"
#include "dphase/run.hpp"

using namespace dphase;
namespace fs = std::filesystem;

namespace {

const char* kMinimalContinue = R"(# minimal continuation run
mode = continue
domain.dim = 2
domain.shape = square
domain.resolution = 16
weight.preset = parabola
weight.c = 4
rhs.preset = constant
rhs.scale = 0.5
exponents.q = 1.3
exponents.k_max = 4
)";

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("dphase_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

// A path below a regular file: no writer can create it, whoever runs the tests.
std::string unwritable_path(const std::string& name) {
  const auto blocker = scratch("blocker");
  std::ofstream(blocker) << "x";
  return (blocker / name).string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(DPHASE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ConfigError::Kind error_kind(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigError::Kind::syntax;
}

}  // namespace

TEST_CASE("parse a minimal continuation config") {
  const auto c = parse_config(kMinimalContinue);
  CHECK(c.mode == Mode::continuation);
  CHECK(c.dim == 2);
  CHECK(c.shape == Shape::square);
  CHECK(c.resolution == 16);
  CHECK(c.weight_preset == WeightPreset::parabola);
  CHECK(c.weight_c == 4.0);
  CHECK(c.rhs_scale == 0.5);
  CHECK(c.q == 1.3);
  CHECK(c.k_max == 4);
  CHECK_FALSE(c.p.has_value());
  CHECK(c.epsilon0 == 1e-2);
  CHECK(c.p_min() == 1.0625);
  CHECK(parse_config(to_text(c)) == c);
}

TEST_CASE("config errors carry key and line") {
  std::string text = kMinimalContinue;
  text.replace(text.find("exponents.q = 1.3"), 17, "exponents.q = 0.9");
  try {
    parse_config(text);
    FAIL("q = 0.9 accepted");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigError::Kind::bad_value);
    CHECK(e.key() == "exponents.q");
    CHECK(e.line() == 10);
    CHECK(std::string(e.what()).find("exponents.q") != std::string::npos);
  }

  std::string no_k = kMinimalContinue;
  no_k.erase(no_k.find("exponents.k_max"));
  try {
    parse_config(no_k);
    FAIL("missing k_max accepted");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigError::Kind::missing_key);
    CHECK(e.key() == "exponents.k_max");
  }

  CHECK(error_kind(std::string(kMinimalContinue) + "solver.tolerance = 1e-9\n") == ConfigError::Kind::unknown_key);
  CHECK(error_kind(std::string(kMinimalContinue) + "just words\n") == ConfigError::Kind::syntax);
  CHECK(error_kind(std::string(kMinimalContinue) + "exponents.q = 1.4\n") == ConfigError::Kind::bad_value);
  CHECK(error_kind(kMinimalContinue, {"domain.resolution=abc"}) == ConfigError::Kind::bad_value);
  CHECK(error_kind(kMinimalContinue, {"domain.shape=disk", "domain.dim=3"}) == ConfigError::Kind::bad_value);
  CHECK(error_kind(kMinimalContinue, {"mode=solve"}) == ConfigError::Kind::missing_key);
  CHECK(error_kind(kMinimalContinue, {"mode=sweep"}) == ConfigError::Kind::missing_key);
  CHECK(error_kind(kMinimalContinue, {"mode=sweep", "sweep.key=mode", "sweep.values=solve"}) ==
        ConfigError::Kind::bad_value);
  CHECK(error_kind(kMinimalContinue, {"weight.preset=ring"}) == ConfigError::Kind::missing_key);
  CHECK(error_kind(kMinimalContinue, {"strict_h0=maybe"}) == ConfigError::Kind::bad_value);
  CHECK(error_kind(kMinimalContinue, {"bogus.key=1"}) == ConfigError::Kind::unknown_key);
}

TEST_CASE("overrides and round trips") {
  const auto c = parse_config(kMinimalContinue, {"exponents.q = 1.25", "seed=42", "rhs.preset=gaussian_bump",
                                                  "mode=sweep", "sweep.key=rhs.scale", "sweep.values=0.1, 0.2,0.3"});
  CHECK(c.q == 1.25);
  CHECK(c.seed == 42);
  CHECK(c.rhs_preset == RhsPreset::gaussian_bump);
  CHECK(c.sweep_values == std::vector<std::string>{"0.1", "0.2", "0.3"});
  CHECK(parse_config(to_text(c)) == c);

  auto d = parse_config(kMinimalContinue, {"weight.c=0.1", "solver.tol=3.3e-10", "output.csv_path=/tmp/x.csv"});
  d.epsilon0 = 0.1 + 0.2;  // not representable in short form
  CHECK(parse_config(to_text(d)) == d);
  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
  CHECK(format_double(1e-2) == "0.01");
}

TEST_CASE("csv output") {
  StepDiagnostics zero;
  zero.p = 1.5;
  zero.pairing_ratio = 1.0;
  zero.ratio_ok = true;
  for (double r : {1.0, 2.0, 4.0, 8.0}) zero.flux_lr.emplace_back(r, 0.0);
  const auto text = csv_text({zero});
  const auto rows = lines(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "p,lambda_p,weighted_q,flux_l1,flux_l2,flux_l4,flux_l8,flux_sup,theta0_diff_prev,pairing_ratio,residual,iterations,ratio_ok");
  CHECK(rows[1] == "1.5,0,0,0,0,0,0,0,0,1,0,0,1");

  CHECK_THROWS_AS(csv_text({}), std::invalid_argument);
  StepDiagnostics partial = zero;
  partial.flux_lr.pop_back();
  CHECK_THROWS_AS(csv_text({partial}), std::invalid_argument);
  CHECK_THROWS_AS(emit_csv({zero}, unwritable_path("out.csv")), std::runtime_error);

  const auto path = scratch("single.csv");
  emit_csv({zero, zero}, path.string());
  CHECK(slurp(path) == text + rows[1] + "\n");
}

TEST_CASE("rhs presets") {
  const auto g = build_grid(2, 16, Shape::square);
  const auto c = make_rhs(RhsPreset::constant, 0.3, 0.25, 4, g);
  for (double v : c.values) CHECK(v == 0.3);
  const auto bump = make_rhs(RhsPreset::gaussian_bump, 2.0, 0.25, 4, g);
  const std::size_t center = 8 * (1 + g->stride(1));
  CHECK(bump.values[center] == doctest::Approx(2.0));
  CHECK(bump.values[0] == doctest::Approx(2.0 * std::exp(-0.5 / 0.0625)));
  const auto checker = make_rhs(RhsPreset::checker, 1.0, 0.25, 2, g);
  CHECK(checker.values[g->stride(1) * 2 + 2] == 1.0);
  CHECK(checker.values[g->stride(1) * 2 + 12] == -1.0);
  CHECK(checker.values[g->stride(1) * 12 + 12] == 1.0);
  CHECK(checker.values[g->node_count() - 1] == 1.0);
}

TEST_CASE("run: exit code contract") {
  auto zero = parse_config(kMinimalContinue, {"rhs.scale=0"});
  const auto z = run(zero);
  CHECK(z.exit_code == kExitOk);
  REQUIRE(z.certificate.has_value());
  CHECK(z.certificate->verdict == CertificateVerdict::certified);

  const auto strict =
      run(parse_config(kMinimalContinue, {"strict_h0=true", "exponents.q=1.6", "exponents.k_max=5"}));
  CHECK(strict.exit_code == kExitConfig);
  CHECK(strict.message.find("(H_0) violation") != std::string::npos);

  const auto stuck = run(parse_config(kMinimalContinue, {"solver.max_iter=1", "exponents.k_max=6"}));
  CHECK(stuck.exit_code == kExitNoConvergence);
  CHECK_FALSE(stuck.steps.empty());

  const auto solve = run(parse_config(kMinimalContinue, {"mode=solve", "exponents.p=1.5"}));
  CHECK(solve.exit_code == kExitOk);
  REQUIRE(solve.solve.has_value());
  CHECK(solve.solve->converged);
  CHECK(solve.steps.size() == 1);

  const auto weight = run(parse_config(kMinimalContinue, {"mode=check_weight"}));
  CHECK(weight.exit_code == kExitOk);
  REQUIRE(weight.h0.has_value());
  CHECK(weight.h0->verdict == Verdict::pass);

  const auto bad_ring = run(parse_config(kMinimalContinue, {"mode=check_weight", "domain.shape=disk", "weight.preset=ring",
                                                            "weight.k=4", "weight.r0=1.5"}));
  CHECK(bad_ring.exit_code == kExitConfig);

  const auto unwritable = run(parse_config(kMinimalContinue, {"output.csv_path=" + unwritable_path("a.csv")}));
  CHECK(unwritable.exit_code == kExitConfig);
}

TEST_CASE("run: standard instance writes one row per step") {
  const auto csv = scratch("standard.csv");
  const auto json = scratch("standard.json");
  const auto cfg = parse_config(kMinimalContinue, {"domain.resolution=64", "exponents.k_max=10",
                                                   "output.csv_path=" + csv.string(), "output.json_path=" + json.string()});
  const auto s = run(cfg);
  REQUIRE(s.certificate.has_value());
  // The exit code follows the certificate verdict.
  CHECK(s.exit_code == (s.certificate->verdict == CertificateVerdict::failed ? kExitCertificateFailed : kExitOk));
  const auto rows = lines(slurp(csv));
  CHECK(rows.size() == 11);
  for (const auto& r : rows) CHECK(std::count(r.begin(), r.end(), ',') == 12);

  // determinism
  const auto first_csv = slurp(csv), first_json = slurp(json);
  run(cfg);
  CHECK(slurp(csv) == first_csv);
  CHECK(slurp(json) == first_json);

  // the config echo parses back to the same configuration
  CHECK(config_from_summary_json(first_json) == cfg);
}

TEST_CASE("run: sweep fans out with indexed outputs") {
  ::setenv("DPHASE_THREADS", "2", 1);
  CHECK(sweep_workers(5) == 2);
  CHECK(sweep_workers(1) == 1);
  CHECK(indexed_path("dir/out.csv", 3) == "dir/out_3.csv");

  const auto csv = scratch("sweep.csv");
  const auto json = scratch("sweep.json");
  const auto s = run(parse_config(kMinimalContinue, {"mode=sweep", "sweep.key=rhs.scale", "sweep.values=0,0.25,-1e9x",
                                                     "output.csv_path=" + csv.string(),
                                                     "output.json_path=" + json.string()}));
  REQUIRE(s.runs.size() == 3);
  CHECK(s.runs[0].exit_code == kExitOk);
  CHECK(s.runs[2].exit_code == kExitConfig);
  CHECK(s.exit_code == kExitConfig);
  CHECK(fs::exists(scratch("sweep_0.csv")));
  CHECK(fs::exists(scratch("sweep_1.json")));
  CHECK(fs::exists(json));
  CHECK(lines(slurp(scratch("sweep_1.csv"))).size() == 5);
  ::unsetenv("DPHASE_THREADS");
}

TEST_CASE("command line tool") {
  const auto cfg = scratch("cli.conf");
  {
    std::ofstream out(cfg);
    out << kMinimalContinue;
  }
  const std::string c = cfg.string();
  CHECK(cli(c + " --override rhs.scale=0") == 0);
  CHECK(cli(c + " --override exponents.q=0.9") == 1);
  CHECK(cli(c + " --override strict_h0=true --override exponents.q=1.6 --override exponents.k_max=5") == 1);
  CHECK(cli(c + " --override solver.max_iter=1 --override exponents.k_max=6") == 3);
  CHECK(cli(scratch("missing.conf").string()) == 1);
  CHECK(cli("") == 1);

  const auto csv_a = scratch("cli_a.csv"), csv_b = scratch("cli_b.csv");
  const int code = cli(c + " --override output.csv_path=" + csv_a.string());
  CHECK((code == 0 || code == 2));
  CHECK(cli(c + " --override output.csv_path=" + csv_b.string()) == code);
  CHECK(slurp(csv_a) == slurp(csv_b));
  CHECK(lines(slurp(csv_a)).size() == 5);
}
