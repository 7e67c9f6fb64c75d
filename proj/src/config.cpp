#include "dphase/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace dphase {

Mode parse_mode(std::string_view name) {
  if (name == "solve") return Mode::solve;
  if (name == "continue") return Mode::continuation;
  if (name == "check_weight") return Mode::check_weight;
  if (name == "sweep") return Mode::sweep;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::solve: return "solve";
    case Mode::continuation: return "continue";
    case Mode::check_weight: return "check_weight";
    case Mode::sweep: return "sweep";
  }
  return "?";
}

RhsPreset parse_rhs_preset(std::string_view name) {
  if (name == "constant") return RhsPreset::constant;
  if (name == "gaussian_bump") return RhsPreset::gaussian_bump;
  if (name == "checker") return RhsPreset::checker;
  throw std::invalid_argument("unknown rhs preset '" + std::string(name) + "'");
}

std::string_view to_string(RhsPreset preset) {
  switch (preset) {
    case RhsPreset::constant: return "constant";
    case RhsPreset::gaussian_bump: return "gaussian_bump";
    case RhsPreset::checker: return "checker";
  }
  return "?";
}

namespace {

std::string kind_label(ConfigError::Kind kind) {
  switch (kind) {
    case ConfigError::Kind::missing_key: return "missing key";
    case ConfigError::Kind::bad_value: return "bad value";
    case ConfigError::Kind::unknown_key: return "unknown key";
    case ConfigError::Kind::syntax: return "syntax error";
  }
  return "error";
}

std::string error_text(ConfigError::Kind kind, const std::string& key, int line, const std::string& detail) {
  std::string s = kind_label(kind);
  if (!key.empty()) s += " '" + key + "'";
  if (line > 0) s += " (line " + std::to_string(line) + ")";
  if (!detail.empty()) s += ": " + detail;
  return s;
}

}  // namespace

ConfigError::ConfigError(Kind kind, std::string key, int line, const std::string& detail)
    : std::runtime_error(error_text(kind, key, line, detail)), kind_(kind), key_(std::move(key)), line_(line) {}

double RunConfig::p_min() const {
  if (p) return *p;
  if (k_max) return 1.0 + std::ldexp(1.0, -*k_max);
  throw std::logic_error("RunConfig has neither exponents.p nor exponents.k_max");
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "mode",           "domain.dim",      "domain.shape",     "domain.resolution", "weight.preset",
      "weight.c",       "weight.k",        "weight.r0",        "weight.aq_floor",   "rhs.preset",
      "rhs.scale",      "rhs.sigma",       "rhs.blocks",       "exponents.q",       "exponents.p",
      "exponents.k_max", "solver.epsilon0", "solver.tol",      "solver.max_iter",   "output.csv_path",
      "output.json_path", "strict_h0",     "seed",             "uniqueness.seeds",  "sweep.key",
      "sweep.values"};
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const Entry& require(const std::string& key, const std::string& why) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(ConfigError::Kind::missing_key, key, 0, why);
    return it->second;
  }

  [[noreturn]] void bad(const std::string& key, const std::string& detail) const {
    const auto it = entries_.find(key);
    throw ConfigError(ConfigError::Kind::bad_value, key, it == entries_.end() ? 0 : it->second.line, detail);
  }

  double real(const std::string& key) const {
    const auto& e = entries_.at(key);
    double v = 0.0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) bad(key, "expected a finite number, got '" + e.value + "'");
    return v;
  }

  long long integer(const std::string& key) const {
    const auto& e = entries_.at(key);
    long long v = 0;
    const auto* first = e.value.data();
    const auto* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) bad(key, "expected an integer, got '" + e.value + "'");
    return v;
  }

  bool boolean(const std::string& key) const {
    const auto& v = entries_.at(key).value;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad(key, "expected true or false, got '" + v + "'");
  }

  const std::string& text(const std::string& key) const { return entries_.at(key).value; }

  template <class F>
  auto named(const std::string& key, F parse) const {
    try {
      return parse(text(key));
    } catch (const std::invalid_argument& e) {
      bad(key, e.what());
    }
  }

private:
  std::map<std::string, Entry> entries_;
};

void put_line(std::map<std::string, Entry>& entries, std::string_view raw, int line, bool is_override) {
  const auto eq = raw.find('=');
  const std::string where = is_override ? "override '" + std::string(raw) + "'" : "expected 'key = value'";
  if (eq == std::string_view::npos) throw ConfigError(ConfigError::Kind::syntax, "", line, where);
  const std::string key(trim(raw.substr(0, eq)));
  const std::string value(trim(raw.substr(eq + 1)));
  if (key.empty()) throw ConfigError(ConfigError::Kind::syntax, "", line, where);
  if (!known_keys().count(key)) throw ConfigError(ConfigError::Kind::unknown_key, key, line, "");
  if (!is_override && entries.count(key))
    throw ConfigError(ConfigError::Kind::bad_value, key, line,
                      "duplicate key (first set on line " + std::to_string(entries[key].line) + ")");
  entries[key] = Entry{value, line};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto item = trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

RunConfig build(const Reader& r) {
  RunConfig c;
  const std::string base = "required in every mode";

  r.require("mode", base);
  c.mode = r.named("mode", parse_mode);

  r.require("domain.dim", base);
  r.require("domain.shape", base);
  r.require("domain.resolution", base);
  const auto dim = r.integer("domain.dim");
  if (dim < 1 || dim > 3) r.bad("domain.dim", "must be 1, 2 or 3");
  c.dim = static_cast<int>(dim);
  c.shape = r.named("domain.shape", parse_shape);
  const auto res = r.integer("domain.resolution");
  if (res < 4 || res > 4096) r.bad("domain.resolution", "must lie in [4, 4096]");
  c.resolution = static_cast<int>(res);
  const bool shape_ok = (c.shape == Shape::interval && c.dim == 1) || (c.shape == Shape::square && c.dim >= 2) ||
                        (c.shape == Shape::disk && c.dim == 2);
  if (!shape_ok) r.bad("domain.shape", "shape does not exist in dimension " + std::to_string(c.dim));

  r.require("weight.preset", base);
  c.weight_preset = r.named("weight.preset", parse_weight_preset);
  r.require("weight.c", base);
  c.weight_c = r.real("weight.c");
  if (!(c.weight_c > 0.0)) r.bad("weight.c", "must be positive");
  if (c.weight_preset == WeightPreset::ring) {
    r.require("weight.k", "required by the ring preset");
    r.require("weight.r0", "required by the ring preset");
  }
  if (r.has("weight.k")) {
    c.weight_k = r.real("weight.k");
    if (!(c.weight_k > 0.0)) r.bad("weight.k", "must be positive");
  }
  if (r.has("weight.r0")) {
    c.weight_r0 = r.real("weight.r0");
    if (!(c.weight_r0 >= 0.0)) r.bad("weight.r0", "must be non-negative");
  }
  if (r.has("weight.aq_floor")) {
    c.aq_floor = r.real("weight.aq_floor");
    if (!(c.aq_floor > 0.0 && c.aq_floor < 1.0)) r.bad("weight.aq_floor", "must lie in (0, 1)");
  }

  r.require("exponents.q", base);
  c.q = r.real("exponents.q");
  if (!(c.q > 1.0)) r.bad("exponents.q", "q must exceed 1");

  if (r.has("exponents.p")) {
    const double p = r.real("exponents.p");
    if (!(p > 1.0)) r.bad("exponents.p", "p must exceed 1");
    c.p = p;
  }
  if (r.has("exponents.k_max")) {
    const auto k = r.integer("exponents.k_max");
    if (k < 1 || k > 40) r.bad("exponents.k_max", "must lie in [1, 40]");
    c.k_max = static_cast<int>(k);
  }
  switch (c.mode) {
    case Mode::solve: r.require("exponents.p", "required by mode solve"); break;
    case Mode::continuation:
    case Mode::sweep: r.require("exponents.k_max", "required by mode " + std::string(to_string(c.mode))); break;
    case Mode::check_weight:
      if (!c.p && !c.k_max) r.require("exponents.k_max", "mode check_weight needs exponents.p or exponents.k_max");
      break;
  }

  if (c.mode != Mode::check_weight) {
    r.require("rhs.preset", "required by mode " + std::string(to_string(c.mode)));
    r.require("rhs.scale", "required by mode " + std::string(to_string(c.mode)));
  }
  if (r.has("rhs.preset")) c.rhs_preset = r.named("rhs.preset", parse_rhs_preset);
  if (r.has("rhs.scale")) c.rhs_scale = r.real("rhs.scale");
  if (r.has("rhs.sigma")) {
    c.rhs_sigma = r.real("rhs.sigma");
    if (!(c.rhs_sigma > 0.0)) r.bad("rhs.sigma", "must be positive");
  }
  if (r.has("rhs.blocks")) {
    const auto b = r.integer("rhs.blocks");
    if (b < 1 || b > 1024) r.bad("rhs.blocks", "must lie in [1, 1024]");
    c.rhs_blocks = static_cast<int>(b);
  }

  if (r.has("solver.epsilon0")) {
    c.epsilon0 = r.real("solver.epsilon0");
    if (!(c.epsilon0 >= 0.0)) r.bad("solver.epsilon0", "must be non-negative");
  }
  if (r.has("solver.tol")) {
    c.solver_tol = r.real("solver.tol");
    if (!(c.solver_tol > 0.0)) r.bad("solver.tol", "must be positive");
  }
  if (r.has("solver.max_iter")) {
    const auto m = r.integer("solver.max_iter");
    if (m < 1 || m > 1000000) r.bad("solver.max_iter", "must lie in [1, 1000000]");
    c.max_iter = static_cast<int>(m);
  }

  if (r.has("output.csv_path")) c.csv_path = r.text("output.csv_path");
  if (r.has("output.json_path")) c.json_path = r.text("output.json_path");
  if (r.has("strict_h0")) c.strict_h0 = r.boolean("strict_h0");
  if (r.has("seed")) {
    const auto s = r.integer("seed");
    if (s < 0) r.bad("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (r.has("uniqueness.seeds")) {
    const auto s = r.integer("uniqueness.seeds");
    if (s != 0 && (s < 2 || s > 64)) r.bad("uniqueness.seeds", "must be 0 or lie in [2, 64]");
    c.uniqueness_seeds = static_cast<int>(s);
  }

  if (c.mode == Mode::sweep) {
    r.require("sweep.key", "required by mode sweep");
    r.require("sweep.values", "required by mode sweep");
  }
  if (r.has("sweep.key")) {
    c.sweep_key = r.text("sweep.key");
    if (!known_keys().count(c.sweep_key) || c.sweep_key == "mode" || c.sweep_key.rfind("sweep.", 0) == 0 ||
        c.sweep_key.rfind("output.", 0) == 0)
      r.bad("sweep.key", "'" + c.sweep_key + "' cannot be swept");
  }
  if (r.has("sweep.values")) {
    c.sweep_values = split_list(r.text("sweep.values"));
    if (c.sweep_values.empty()) r.bad("sweep.values", "empty list");
  }
  return c;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) put_line(entries, line, line_no, false);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  for (const auto& o : overrides) put_line(entries, trim(o), 0, true);
  return build(Reader(std::move(entries)));
}

std::map<std::string, std::string> to_entries(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["mode"] = to_string(c.mode);
  m["domain.dim"] = std::to_string(c.dim);
  m["domain.shape"] = to_string(c.shape);
  m["domain.resolution"] = std::to_string(c.resolution);
  m["weight.preset"] = to_string(c.weight_preset);
  m["weight.c"] = format_double(c.weight_c);
  m["weight.k"] = format_double(c.weight_k);
  m["weight.r0"] = format_double(c.weight_r0);
  m["weight.aq_floor"] = format_double(c.aq_floor);
  m["rhs.preset"] = to_string(c.rhs_preset);
  m["rhs.scale"] = format_double(c.rhs_scale);
  m["rhs.sigma"] = format_double(c.rhs_sigma);
  m["rhs.blocks"] = std::to_string(c.rhs_blocks);
  m["exponents.q"] = format_double(c.q);
  if (c.p) m["exponents.p"] = format_double(*c.p);
  if (c.k_max) m["exponents.k_max"] = std::to_string(*c.k_max);
  m["solver.epsilon0"] = format_double(c.epsilon0);
  m["solver.tol"] = format_double(c.solver_tol);
  m["solver.max_iter"] = std::to_string(c.max_iter);
  if (!c.csv_path.empty()) m["output.csv_path"] = c.csv_path;
  if (!c.json_path.empty()) m["output.json_path"] = c.json_path;
  m["strict_h0"] = c.strict_h0 ? "true" : "false";
  m["seed"] = std::to_string(c.seed);
  m["uniqueness.seeds"] = std::to_string(c.uniqueness_seeds);
  if (!c.sweep_key.empty()) m["sweep.key"] = c.sweep_key;
  if (!c.sweep_values.empty()) {
    std::string joined;
    for (const auto& v : c.sweep_values) joined += (joined.empty() ? "" : ",") + v;
    m["sweep.values"] = joined;
  }
  return m;
}

std::string to_text(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& [k, v] : to_entries(config)) out << k << " = " << v << '\n';
  return out.str();
}

}  // namespace dphase
