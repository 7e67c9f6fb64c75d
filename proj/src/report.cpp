#include "dphase/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dphase {

namespace {

double flux_at(const StepDiagnostics& s, double r) {
  for (const auto& [rr, v] : s.flux_lr)
    if (rr == r) return v;
  throw std::invalid_argument("step diagnostics lack the L^" + format_double(r) + " flux norm");
}

void write_file(const std::string& path, const std::string& body) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// nlohmann writes non-finite doubles as null; keep them readable instead.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

nlohmann::json to_json(const H0Report& h) {
  return {{"lipschitz_estimate", number(h.lipschitz_estimate)},
          {"aq_constant", number(h.aq_constant)},
          {"boundary_min", number(h.boundary_min)},
          {"exponent_ratio_ok", h.exponent_ratio_ok},
          {"ratio_condition", h.ratio_condition},
          {"q_below_n", h.q_below_n},
          {"floor_relative", number(h.floor_relative)},
          {"verdict", std::string(to_string(h.verdict))}};
}

nlohmann::json to_json(const SmallnessResult& s) {
  return {{"f_norm", number(s.f_norm)}, {"lhs", number(s.lhs)}, {"pass", s.pass}};
}

nlohmann::json to_json(const SolveSummary& s) {
  return {{"p", number(s.p)},           {"epsilon", number(s.epsilon)}, {"energy", number(s.energy)},
          {"grad_sup", number(s.grad_sup)}, {"residual", number(s.residual)}, {"u_sup", number(s.u_sup)},
          {"iterations", s.iterations}, {"converged", s.converged}};
}

nlohmann::json to_json(const StepDiagnostics& s) {
  nlohmann::json flux = nlohmann::json::array();
  for (const auto& [r, v] : s.flux_lr) flux.push_back({number(r), number(v)});
  return {{"p", number(s.p)},
          {"epsilon", number(s.epsilon)},
          {"lambda_p", number(s.lambda_p)},
          {"weighted_q", number(s.weighted_q)},
          {"flux_lr", flux},
          {"flux_sup", number(s.flux_sup)},
          {"theta0_diff_prev", number(s.theta0_diff_prev)},
          {"pairing_ratio", number(s.pairing_ratio)},
          {"residual", number(s.residual)},
          {"iterations", s.iterations},
          {"ratio_ok", s.ratio_ok},
          {"converged", s.converged},
          {"energy", number(s.energy)},
          {"monotone_gap", number(s.monotone_gap)}};
}

nlohmann::json to_json(const LimitCertificate& c) {
  return {{"flux_sup_final", number(c.flux_sup_final)},
          {"pairing_ratio_final", number(c.pairing_ratio_final)},
          {"residual_final", number(c.residual_final)},
          {"theta0_cauchy", c.theta0_cauchy},
          {"smallness_lhs", number(c.smallness_lhs)},
          {"smallness_pass", c.smallness_pass},
          {"eps_sensitivity", number(c.eps_sensitivity)},
          {"verdict", std::string(to_string(c.verdict))},
          {"tolerances",
           {{"flux", c.tolerances.flux},
            {"pairing", c.tolerances.pairing},
            {"residual", c.tolerances.residual},
            {"theta0", c.tolerances.theta0}}}};
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json j;
  j["config"] = to_entries(s.config);
  if (s.h0) j["h0"] = to_json(*s.h0);
  if (s.smallness) j["smallness"] = to_json(*s.smallness);
  if (s.solve) j["solve"] = to_json(*s.solve);
  if (!s.steps.empty()) {
    auto& steps = j["steps"] = nlohmann::json::array();
    for (const auto& st : s.steps) steps.push_back(to_json(st));
  }
  if (s.certificate) j["certificate"] = to_json(*s.certificate);
  if (s.uniqueness_gap) j["uniqueness_gap"] = number(*s.uniqueness_gap);
  if (!s.runs.empty()) {
    auto& runs = j["runs"] = nlohmann::json::array();
    for (const auto& r : s.runs) runs.push_back(to_json(r));
  }
  j["exit_code"] = s.exit_code;
  j["message"] = s.message;
  return j;
}

}  // namespace

std::string csv_text(const std::vector<StepDiagnostics>& steps) {
  if (steps.empty()) throw std::invalid_argument("emit_csv needs at least one step");
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& s : steps) {
    const double reals[] = {s.p,           s.lambda_p,       s.weighted_q,       flux_at(s, 1.0),
                            flux_at(s, 2.0), flux_at(s, 4.0), flux_at(s, 8.0),    s.flux_sup,
                            s.theta0_diff_prev, s.pairing_ratio, s.residual};
    for (double v : reals) out += format_double(v) + ',';
    out += std::to_string(s.iterations) + ',' + (s.ratio_ok ? '1' : '0') + '\n';
  }
  return out;
}

void emit_csv(const std::vector<StepDiagnostics>& steps, const std::string& path) {
  write_file(path, csv_text(steps));
}

std::string summary_json(const RunSummary& summary) { return to_json(summary).dump(2) + '\n'; }

void write_json(const RunSummary& summary, const std::string& path) { write_file(path, summary_json(summary)); }

RunConfig config_from_summary_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  std::ostringstream text;
  for (const auto& [k, v] : j.at("config").items()) text << k << " = " << v.get<std::string>() << '\n';
  return parse_config(text.str());
}

}  // namespace dphase
