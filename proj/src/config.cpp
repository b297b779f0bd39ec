#include "dwl/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dwl/errors.hpp"

namespace dwl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ParseError(line, key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& v, int line, const std::string& key) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ParseError(line, key + ": expected true or false, got '" + v + "'");
}

// "level:re:im; level:re:im; ..."
SuperpositionSpec parse_coefficients(const std::string& v, int line) {
  SuperpositionSpec spec;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    std::stringstream fields(item);
    std::string level;
    std::string re;
    std::string im;
    if (!std::getline(fields, level, ':') || !std::getline(fields, re, ':') || !std::getline(fields, im)) {
      throw ParseError(line, "coefficients: expected level:re:im, got '" + item + "'");
    }
    spec.terms.emplace_back(parse_uint(trim(level), line, "coefficients"),
                            complex(parse_double(trim(re), line, "coefficients"),
                                    parse_double(trim(im), line, "coefficients")));
  }
  return spec;
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(RateUnit unit) { return unit == RateUnit::Hz ? "hz" : "dimensionless"; }
std::string to_string(ErConvention c) { return c == ErConvention::Hbar ? "hbar" : "h"; }
std::string to_string(DirectionModel m) { return m == DirectionModel::Isotropic ? "isotropic" : "dipole"; }
std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::LState:
      return "L";
    case InitialKind::Gaussian:
      return "gaussian";
    case InitialKind::Coefficients:
      return "coefficients";
  }
  return "?";
}

std::size_t PropagationSpec::total_steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }

std::size_t PropagationSpec::steps_per_record() const { return n_record == 0 ? 0 : total_steps() / n_record; }

LatticeParams RunConfig::physical_lattice() const {
  LatticeParams p = lattice;
  if (er_convention == ErConvention::H) p.er_frequency *= 2.0 * std::numbers::pi;
  return p;
}

double RunConfig::dimensionless_rate() const {
  return kick.unit == RateUnit::Hz ? convert_rate(physical_lattice(), kick.rate) : kick.rate;
}

KickParams RunConfig::kick_params() const {
  KickParams kp;
  kp.enabled = kick.enabled;
  kp.strength_m = kick.strength_m;
  kp.rate = dimensionless_rate();
  kp.direction = kick.direction;
  return kp;
}

EnsembleConfig RunConfig::ensemble_config() const {
  EnsembleConfig cfg;
  cfg.n_trajectories = ensemble.n_trajectories;
  cfg.base_seed = ensemble.base_seed;
  cfg.n_records = propagation.n_record;
  cfg.steps_per_record = propagation.steps_per_record();
  cfg.kick = kick_params();
  cfg.initial_well_center = initial_state.center;
  cfg.threads = ensemble.threads;
  cfg.keep_kick_logs = output.kick_log;
  return cfg;
}

void RunConfig::validate() const {
  lattice.validate();
  if (n_max < 2) throw ValidationError("n_max", "must be >= 2");
  try {
    init_grid(grid.x_min, grid.x_max, grid.n_points);
  } catch (const BadDomain& e) {
    throw ValidationError("grid", e.what());
  }

  const PropagationSpec& pr = propagation;
  if (!(pr.dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (!(pr.t_final > 0.0)) throw ValidationError("t_final", "must be > 0");
  if (pr.n_record < 1) throw ValidationError("n_record", "must be >= 1");
  const double steps = pr.t_final / pr.dt;
  if (std::abs(steps - std::round(steps)) > 1e-6 * steps) {
    throw ValidationError("t_final", "must be a whole number of time steps dt");
  }
  if (pr.total_steps() % pr.n_record != 0) {
    throw ValidationError("n_record", "must divide the number of steps t_final/dt");
  }

  const InitialState& init = initial_state;
  if (!(init.sigma > 0.0)) throw ValidationError("sigma", "must be > 0");
  if (!(init.center >= grid.x_min && init.center < grid.x_max)) {
    throw ValidationError("center", "must lie inside the grid domain");
  }
  if (init.levels < 1) throw ValidationError("levels", "must be >= 1");
  if (init.kind == InitialKind::Coefficients) {
    if (init.coefficients.terms.empty()) throw ValidationError("coefficients", "must list at least one level");
    for (const auto& [level, c] : init.coefficients.terms) {
      if (level >= static_cast<std::size_t>(2 * n_max + 1)) {
        throw ValidationError("coefficients", "level " + std::to_string(level) + " exceeds the basis size");
      }
    }
    if (!(init.coefficients.norm_squared() > 0.0)) throw ValidationError("coefficients", "all amplitudes are zero");
  }

  if (!(kick.strength_m > 0.0)) throw ValidationError("strength_m", "must be > 0");
  if (!(kick.rate >= 0.0)) throw ValidationError("rate", "must be >= 0");
  if (ensemble.n_trajectories < 1) throw ValidationError("n_trajectories", "must be >= 1");
  if (output.format != "csv") throw ValidationError("format", "only csv output is supported");
}

RunConfig parse_config(std::string_view text, RateUnit bare_rate_unit) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, int)>;
  std::set<std::string> rate_keys;
  bool enabled_given = false;

  const std::map<std::string, Setter> setters = {
      {"lattice.v_xy", [&](const std::string& v, int l) { c.lattice.v_xy = parse_double(v, l, "v_xy"); }},
      {"lattice.z_f", [&](const std::string& v, int l) { c.lattice.z_f = parse_double(v, l, "z_f"); }},
      {"lattice.theta_xy", [&](const std::string& v, int l) { c.lattice.theta_xy = parse_double(v, l, "theta_xy"); }},
      {"lattice.theta_z", [&](const std::string& v, int l) { c.lattice.theta_z = parse_double(v, l, "theta_z"); }},
      {"lattice.phi_xy", [&](const std::string& v, int l) { c.lattice.phi_xy = parse_double(v, l, "phi_xy"); }},
      {"lattice.phi_z", [&](const std::string& v, int l) { c.lattice.phi_z = parse_double(v, l, "phi_z"); }},
      {"lattice.er_frequency",
       [&](const std::string& v, int l) { c.lattice.er_frequency = parse_double(v, l, "er_frequency"); }},
      {"lattice.er_convention",
       [&](const std::string& v, int l) {
         if (v == "hbar") {
           c.er_convention = ErConvention::Hbar;
         } else if (v == "h") {
           c.er_convention = ErConvention::H;
         } else {
           throw ParseError(l, "er_convention: expected hbar or h, got '" + v + "'");
         }
       }},
      {"spectrum.n_max",
       [&](const std::string& v, int l) { c.n_max = static_cast<int>(parse_uint(v, l, "n_max")); }},
      {"grid.x_min", [&](const std::string& v, int l) { c.grid.x_min = parse_double(v, l, "x_min"); }},
      {"grid.x_max", [&](const std::string& v, int l) { c.grid.x_max = parse_double(v, l, "x_max"); }},
      {"grid.n_points", [&](const std::string& v, int l) { c.grid.n_points = parse_uint(v, l, "n_points"); }},
      {"propagation.dt", [&](const std::string& v, int l) { c.propagation.dt = parse_double(v, l, "dt"); }},
      {"propagation.t_final",
       [&](const std::string& v, int l) { c.propagation.t_final = parse_double(v, l, "t_final"); }},
      {"propagation.n_record",
       [&](const std::string& v, int l) { c.propagation.n_record = parse_uint(v, l, "n_record"); }},
      {"initial_state.kind",
       [&](const std::string& v, int l) {
         if (v == "L") {
           c.initial_state.kind = InitialKind::LState;
         } else if (v == "gaussian") {
           c.initial_state.kind = InitialKind::Gaussian;
         } else if (v == "coefficients") {
           c.initial_state.kind = InitialKind::Coefficients;
         } else {
           throw ParseError(l, "kind: expected L, gaussian or coefficients, got '" + v + "'");
         }
       }},
      {"initial_state.sigma",
       [&](const std::string& v, int l) { c.initial_state.sigma = parse_double(v, l, "sigma"); }},
      {"initial_state.center",
       [&](const std::string& v, int l) { c.initial_state.center = parse_double(v, l, "center"); }},
      {"initial_state.levels",
       [&](const std::string& v, int l) { c.initial_state.levels = parse_uint(v, l, "levels"); }},
      {"initial_state.coefficients",
       [&](const std::string& v, int l) { c.initial_state.coefficients = parse_coefficients(v, l); }},
      {"kick.enabled",
       [&](const std::string& v, int l) {
         c.kick.enabled = parse_bool(v, l, "enabled");
         enabled_given = true;
       }},
      {"kick.strength_m", [&](const std::string& v, int l) { c.kick.strength_m = parse_double(v, l, "strength_m"); }},
      {"kick.rate_hz",
       [&](const std::string& v, int l) {
         c.kick.rate = parse_double(v, l, "rate_hz");
         c.kick.unit = RateUnit::Hz;
         rate_keys.insert("rate_hz");
       }},
      {"kick.rate_dimensionless",
       [&](const std::string& v, int l) {
         c.kick.rate = parse_double(v, l, "rate_dimensionless");
         c.kick.unit = RateUnit::Dimensionless;
         rate_keys.insert("rate_dimensionless");
       }},
      {"kick.rate",
       [&](const std::string& v, int l) {
         c.kick.rate = parse_double(v, l, "rate");
         c.kick.unit = bare_rate_unit;
         rate_keys.insert("rate");
       }},
      {"kick.direction",
       [&](const std::string& v, int l) {
         if (v == "isotropic") {
           c.kick.direction = DirectionModel::Isotropic;
         } else if (v == "dipole") {
           c.kick.direction = DirectionModel::Dipole;
         } else {
           throw ParseError(l, "direction: expected isotropic or dipole, got '" + v + "'");
         }
       }},
      {"ensemble.n_trajectories",
       [&](const std::string& v, int l) { c.ensemble.n_trajectories = parse_uint(v, l, "n_trajectories"); }},
      {"ensemble.base_seed", [&](const std::string& v, int l) { c.ensemble.base_seed = parse_uint(v, l, "base_seed"); }},
      {"ensemble.threads",
       [&](const std::string& v, int l) { c.ensemble.threads = static_cast<unsigned>(parse_uint(v, l, "threads")); }},
      {"output.directory", [&](const std::string& v, int) { c.output.directory = v; }},
      {"output.format", [&](const std::string& v, int) { c.output.format = v; }},
      {"output.error_bars", [&](const std::string& v, int l) { c.output.error_bars = parse_bool(v, l, "error_bars"); }},
      {"output.kick_log", [&](const std::string& v, int l) { c.output.kick_log = parse_bool(v, l, "kick_log"); }},
      {"output.label", [&](const std::string& v, int) { c.label = v; }},
  };

  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header '" + s + "'");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      static const std::set<std::string> sections = {"lattice",      "spectrum", "grid",     "propagation",
                                                      "initial_state", "kick",     "ensemble", "output"};
      if (!sections.contains(section)) throw ParseError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value, got '" + s + "'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (section.empty()) throw ParseError(line, "key '" + key + "' appears before any section header");
    const std::string full = section + "." + key;
    const auto it = setters.find(full);
    if (it == setters.end()) throw ParseError(line, "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(full).second) throw ParseError(line, "duplicate key '" + key + "'");
    it->second(value, line);
  }

  if (rate_keys.size() > 1) throw ValidationError("rate", "give exactly one of rate_hz, rate_dimensionless, rate");
  if (!enabled_given) c.kick.enabled = !rate_keys.empty();
  c.validate();
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[lattice]\n"
    << "v_xy = " << num(c.lattice.v_xy) << '\n'
    << "z_f = " << num(c.lattice.z_f) << '\n'
    << "theta_xy = " << num(c.lattice.theta_xy) << '\n'
    << "theta_z = " << num(c.lattice.theta_z) << '\n'
    << "phi_xy = " << num(c.lattice.phi_xy) << '\n'
    << "phi_z = " << num(c.lattice.phi_z) << '\n'
    << "er_frequency = " << num(c.lattice.er_frequency) << '\n'
    << "er_convention = " << to_string(c.er_convention) << '\n'
    << "\n[spectrum]\n"
    << "n_max = " << c.n_max << '\n'
    << "\n[grid]\n"
    << "x_min = " << num(c.grid.x_min) << '\n'
    << "x_max = " << num(c.grid.x_max) << '\n'
    << "n_points = " << c.grid.n_points << '\n'
    << "\n[propagation]\n"
    << "dt = " << num(c.propagation.dt) << '\n'
    << "t_final = " << num(c.propagation.t_final) << '\n'
    << "n_record = " << c.propagation.n_record << '\n'
    << "\n[initial_state]\n"
    << "kind = " << to_string(c.initial_state.kind) << '\n'
    << "sigma = " << num(c.initial_state.sigma) << '\n'
    << "center = " << num(c.initial_state.center) << '\n'
    << "levels = " << c.initial_state.levels << '\n';
  if (!c.initial_state.coefficients.terms.empty()) {
    o << "coefficients = ";
    bool first = true;
    for (const auto& [level, a] : c.initial_state.coefficients.terms) {
      o << (first ? "" : "; ") << level << ':' << num(a.real()) << ':' << num(a.imag());
      first = false;
    }
    o << '\n';
  }
  o << "\n[kick]\n"
    << "enabled = " << (c.kick.enabled ? "true" : "false") << '\n'
    << "strength_m = " << num(c.kick.strength_m) << '\n'
    << (c.kick.unit == RateUnit::Hz ? "rate_hz = " : "rate_dimensionless = ") << num(c.kick.rate) << '\n'
    << "direction = " << to_string(c.kick.direction) << '\n'
    << "\n[ensemble]\n"
    << "n_trajectories = " << c.ensemble.n_trajectories << '\n'
    << "base_seed = " << c.ensemble.base_seed << '\n'
    << "threads = " << c.ensemble.threads << '\n'
    << "\n[output]\n"
    << "label = " << c.label << '\n'
    << "directory = " << c.output.directory << '\n'
    << "format = " << c.output.format << '\n'
    << "error_bars = " << (c.output.error_bars ? "true" : "false") << '\n'
    << "kick_log = " << (c.output.kick_log ? "true" : "false") << '\n';
  return o.str();
}

}  // namespace dwl
