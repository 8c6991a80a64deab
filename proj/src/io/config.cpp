#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "csv.hpp"
#include "errors.hpp"

namespace lsn {

using nlohmann::json;

namespace {

std::string join_path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void check_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  check_object(j, where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError(join_path(where, it.key()) + ": unknown key");
  }
}

double get_number(const json& j, const std::string& key, const std::string& where, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join_path(where, key) + ": expected a number");
  return v.get<double>();
}

std::optional<double> get_optional_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_number(j, key, where, 0.0);
}

long long get_integer(const json& j, const std::string& key, const std::string& where, long long fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(join_path(where, key) + ": expected an integer");
}

std::size_t get_count(const json& j, const std::string& key, const std::string& where, std::size_t fallback) {
  const long long v = get_integer(j, key, where, static_cast<long long>(fallback));
  if (v < 0) throw ConfigError(join_path(where, key) + ": must be nonnegative");
  return static_cast<std::size_t>(v);
}

bool get_bool(const json& j, const std::string& key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(join_path(where, key) + ": expected true or false");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(join_path(where, key) + ": expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> get_number_list(const json& j, const std::string& key, const std::string& where) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(join_path(where, key) + ": expected an array of numbers");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(join_path(where, key) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

InitialCondition ic_from_json(const json& j, const std::string& where, const std::filesystem::path& base_dir) {
  check_object(j, where);
  const std::string type = get_string(j, "type", where, "");
  InitialCondition ic;
  if (type == "zero") {
    check_keys(j, where, {"type"});
  } else if (type == "poly_bump") {
    check_keys(j, where, {"type", "c", "r1", "r2"});
    ic.kind = InitialCondition::Kind::kPolyBump;
    ic.c = get_number(j, "c", where, 2000.0);
    ic.r1 = get_number(j, "r1", where, 0.2);
    ic.r2 = get_number(j, "r2", where, 0.3);
    if (!(ic.c >= 0.0)) throw ConfigError(where + ".c: must be >= 0");
    if (!(ic.r1 >= 0.0 && ic.r1 < ic.r2)) throw ConfigError(where + ": poly_bump needs 0 <= r1 < r2");
  } else if (type == "table") {
    check_keys(j, where, {"type", "path"});
    ic.kind = InitialCondition::Kind::kTable;
    std::filesystem::path p = get_string(j, "path", where, "");
    if (p.empty()) throw ConfigError(where + ".path: required for a table initial condition");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError(where + ".path: file not found: " + p.string());
    ic.path = std::filesystem::absolute(p).lexically_normal().string();
  } else {
    throw ConfigError(where + ".type: expected zero | poly_bump | table");
  }
  return ic;
}

json ic_to_json(const InitialCondition& ic) {
  switch (ic.kind) {
    case InitialCondition::Kind::kZero: return {{"type", "zero"}};
    case InitialCondition::Kind::kPolyBump: return {{"type", "poly_bump"}, {"c", ic.c}, {"r1", ic.r1}, {"r2", ic.r2}};
    case InitialCondition::Kind::kTable: return {{"type", "table"}, {"path", ic.path}};
  }
  return {};
}

/// Antiderivative of -c (x - r1)(x - r2).
double bump_primitive(double c, double r1, double r2, double x) {
  return -c * (x * x * x / 3.0 - 0.5 * (r1 + r2) * x * x + r1 * r2 * x);
}

json sample_times_default(double t_end) {
  json out = json::array();
  for (double frac : {0.01, 0.1, 0.5}) {
    if (t_end > 0.0) out.push_back(frac * t_end);
  }
  return out;
}

}  // namespace

std::string InitialCondition::label() const {
  switch (kind) {
    case Kind::kZero: return "zero";
    case Kind::kPolyBump: return "poly_bump";
    case Kind::kTable: return "table_" + std::filesystem::path(path).stem().string();
  }
  return "ic";
}

std::vector<double> initial_cell_averages(const InitialCondition& ic, const Grid& grid) {
  std::vector<double> f(grid.n_cells, 0.0);
  const double dx = grid.dx();
  switch (ic.kind) {
    case InitialCondition::Kind::kZero:
      break;
    case InitialCondition::Kind::kPolyBump:
      for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double lo = std::max(grid.face(i), ic.r1);
        const double hi = std::min(grid.face(i + 1), ic.r2);
        if (hi <= lo) continue;
        const double v = bump_primitive(ic.c, ic.r1, ic.r2, hi) - bump_primitive(ic.c, ic.r1, ic.r2, lo);
        f[i] = std::max(v, 0.0) / dx;
      }
      break;
    case InitialCondition::Kind::kTable: {
      const Table table = read_table(ic.path, {"x", "f"});
      const std::vector<double> x = table.column("x");
      const std::vector<double> y = table.column("f");
      for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double c = grid.center(i);
        if (x.empty() || c < x.front() || c > x.back()) continue;
        const auto it = std::upper_bound(x.begin(), x.end(), c);
        const std::size_t k = it == x.end() ? x.size() - 1 : static_cast<std::size_t>(it - x.begin());
        if (k == 0) {
          f[i] = y[0];
          continue;
        }
        const double w = (c - x[k - 1]) / (x[k] - x[k - 1]);
        f[i] = (1.0 - w) * y[k - 1] + w * y[k];
      }
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] >= 0.0)) throw ConfigError("initial table " + ic.path + ": density must be nonnegative");
      }
      break;
    }
  }
  return f;
}

void RunConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho: must be positive");
  if (!(model.a_coef > 0.0)) throw ConfigError("model.a_coef: must be positive");
  if (!(model.b_coef > 0.0)) throw ConfigError("model.b_coef: must be positive");
  if (!(model.n_coef >= 0.0)) throw ConfigError("model.n_coef: must be >= 0");
  if (model.i0 < 1) throw ConfigError("model.i0: must be >= 1");
  if (!(grid.x_max > 0.0) || grid.n_cells == 0) throw ConfigError("grid: need x_max > 0 and n_cells > 0");
  solver.validate();
  if (!(diagnostics.concentration_eps > 0.0 && diagnostics.concentration_eps < grid.x_max)) {
    throw ConfigError("diagnostics.concentration_eps: must lie in (0, x_max)");
  }
  if (!(diagnostics.profile_x_min > 0.0 && diagnostics.profile_x_max > diagnostics.profile_x_min) ||
      diagnostics.profile_points < 2) {
    throw ConfigError("diagnostics: profile abscissa needs 0 < profile_x_min < profile_x_max and >= 2 points");
  }
  for (double th : diagnostics.fractional_moments) {
    if (!(th >= 0.0)) throw ConfigError("diagnostics.fractional_moments: entries must be >= 0");
  }
  if (!(fit.decades > 0.0)) throw ConfigError("fit.decades: must be positive");
  if (oracle.enabled) {
    if (!model.constant_phi()) throw ConfigError("oracle.enabled: the oracle needs alpha == beta");
    if (!(oracle.dt > 0.0)) throw ConfigError("oracle.dt: must be positive");
    if (oracle.t_end && !(*oracle.t_end >= solver.t_end)) {
      throw ConfigError("oracle.t_end: must cover the solver run (>= solver.t_end)");
    }
  }
}

std::vector<std::string> preset_names() { return {"fig1", "fig1_bump", "const_phi"}; }

json preset_json(const std::string& name) {
  json fig1 = {
      {"model", {{"a_coef", 1.0}, {"alpha", 1.0 / 3.0}, {"b_coef", 1.0}, {"beta", 2.0 / 3.0}, {"n_coef", 1.0}, {"i0", 2}}},
      {"rho", 1.0},
      {"initial_condition", {{"type", "zero"}}},
      {"grid", {{"x_max", 1.0}, {"n_cells", 10000}}},
      {"solver", {{"dt", 5e-5}, {"t_end", 400.0}, {"series_stride", 100}}},
      {"diagnostics", {{"fractional_moments", {0.5}}}},
  };
  if (name == "fig1") return fig1;
  if (name == "fig1_bump") {
    fig1["initial_condition"] = {{"type", "poly_bump"}, {"c", 2000.0}, {"r1", 0.2}, {"r2", 0.3}};
    return fig1;
  }
  if (name == "const_phi") {
    return {
        {"model",
         {{"a_coef", 1.0}, {"alpha", 0.0}, {"b_coef", 0.5}, {"beta", 0.0}, {"n_coef", 1.0}, {"i0", 2},
          {"shifted_nucleation", true}}},
        {"rho", 1.0},
        {"initial_condition", {{"type", "poly_bump"}, {"c", 2000.0}, {"r1", 0.2}, {"r2", 0.3}}},
        {"grid", {{"x_max", 3.0}, {"n_cells", 3000}}},
        {"solver", {{"dt", "auto"}, {"t_end", 10.0}, {"series_stride", 10}}},
        {"oracle", {{"enabled", true}, {"dt", 1e-3}}},
    };
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("preset: unknown preset '" + name + "' (known: " + known + ")");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

RateModel model_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"a_coef", "alpha", "b_coef", "beta", "n_coef", "i0", "shifted_nucleation"});
  RateModel m;
  m.a_coef = get_number(j, "a_coef", where, m.a_coef);
  m.alpha = get_number(j, "alpha", where, m.alpha);
  m.b_coef = get_number(j, "b_coef", where, m.b_coef);
  m.beta = get_number(j, "beta", where, m.beta);
  m.n_coef = get_number(j, "n_coef", where, m.n_coef);
  const long long i0 = get_integer(j, "i0", where, m.i0);
  if (i0 < 1 || i0 > 64) throw ConfigError(where + ".i0: must be an integer in [1, 64]");
  m.i0 = static_cast<int>(i0);
  m.shifted_nucleation = get_bool(j, "shifted_nucleation", where, false);
  return m;
}

json model_to_json(const RateModel& m) {
  return {{"a_coef", m.a_coef}, {"alpha", m.alpha}, {"b_coef", m.b_coef}, {"beta", m.beta},
          {"n_coef", m.n_coef}, {"i0", m.i0},       {"shifted_nucleation", m.shifted_nucleation}};
}

RunConfig config_from_json(json doc, const std::vector<std::string>& overrides, const std::filesystem::path& base_dir) {
  check_object(doc, "config");
  for (const auto& o : overrides) apply_override(doc, o);

  RunConfig cfg;
  if (doc.contains("preset") && !doc.at("preset").is_null()) {
    const std::string name = get_string(doc, "preset", "", "");
    json merged = preset_json(name);
    merged.merge_patch(doc);
    doc = std::move(merged);
    cfg.preset = name;
  }
  check_keys(doc, "", {"preset", "model", "rho", "initial_condition", "grid", "solver", "diagnostics", "fit", "oracle",
                       "sweep", "output"});

  if (doc.contains("model")) cfg.model = model_from_json(doc.at("model"));
  cfg.rho = get_number(doc, "rho", "", cfg.rho);
  if (doc.contains("initial_condition")) cfg.initial = ic_from_json(doc.at("initial_condition"), "initial_condition", base_dir);

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    check_keys(g, "grid", {"x_max", "n_cells", "dx"});
    const double x_max = get_number(g, "x_max", "grid", 1.0);
    std::size_t n = get_count(g, "n_cells", "grid", 1000);
    if (g.contains("dx")) {
      if (g.contains("n_cells") && !doc.contains("preset")) {
        throw ConfigError("grid: give either n_cells or dx, not both");
      }
      const double dx = get_number(g, "dx", "grid", 0.0);
      if (!(dx > 0.0 && dx <= x_max)) throw ConfigError("grid.dx: must lie in (0, x_max]");
      n = static_cast<std::size_t>(std::llround(x_max / dx));
    }
    if (!(x_max > 0.0) || n == 0) throw ConfigError("grid: need x_max > 0 and n_cells > 0");
    cfg.grid = Grid(x_max, n);
  }

  json solver = doc.contains("solver") ? doc.at("solver") : json::object();
  check_keys(solver, "solver", {"dt", "cfl_safety", "t_end", "sample_times", "series_stride"});
  if (solver.contains("dt")) {
    const json& dt = solver.at("dt");
    if (dt.is_string()) {
      if (dt.get<std::string>() != "auto") throw ConfigError("solver.dt: expected a number or \"auto\"");
    } else if (!dt.is_null()) {
      cfg.solver.dt = get_number(solver, "dt", "solver", 0.0);
    }
  }
  cfg.solver.cfl_safety = get_number(solver, "cfl_safety", "solver", cfg.solver.cfl_safety);
  cfg.solver.t_end = get_number(solver, "t_end", "solver", cfg.solver.t_end);
  if (!solver.contains("sample_times")) solver["sample_times"] = sample_times_default(cfg.solver.t_end);
  cfg.solver.sample_times = get_number_list(solver, "sample_times", "solver");
  cfg.solver.series_stride = get_count(solver, "series_stride", "solver", cfg.solver.series_stride);

  if (doc.contains("diagnostics")) {
    const json& d = doc.at("diagnostics");
    const std::string w = "diagnostics";
    check_keys(d, w, {"lyapunov", "fractional_moments", "concentration_eps", "profile_scaling", "profile_x_min",
                      "profile_x_max", "profile_points"});
    auto& o = cfg.diagnostics;
    if (d.contains("lyapunov")) {
      if (!d.at("lyapunov").is_array()) throw ConfigError("diagnostics.lyapunov: expected an array of names");
      for (const auto& item : d.at("lyapunov")) {
        if (!item.is_string()) throw ConfigError("diagnostics.lyapunov: expected strings");
        o.extra_lyapunov.push_back(LyapunovChoice::parse(item.get<std::string>()));
      }
    }
    o.fractional_moments = get_number_list(d, "fractional_moments", w);
    o.concentration_eps = get_number(d, "concentration_eps", w, o.concentration_eps);
    const std::string scaling = get_string(d, "profile_scaling", w, "divide");
    if (scaling == "divide") {
      o.profile_scaling = ProfileScaling::kDivide;
    } else if (scaling == "multiply") {
      o.profile_scaling = ProfileScaling::kMultiply;
    } else {
      throw ConfigError("diagnostics.profile_scaling: expected divide | multiply");
    }
    o.profile_x_min = get_number(d, "profile_x_min", w, o.profile_x_min);
    o.profile_x_max = get_number(d, "profile_x_max", w, o.profile_x_max);
    o.profile_points = get_count(d, "profile_points", w, o.profile_points);
  }

  if (doc.contains("fit")) {
    const json& f = doc.at("fit");
    check_keys(f, "fit", {"decades", "t_lo", "t_hi"});
    cfg.fit.decades = get_number(f, "decades", "fit", 1.0);
    cfg.fit.t_lo = get_optional_number(f, "t_lo", "fit");
    cfg.fit.t_hi = get_optional_number(f, "t_hi", "fit");
  }

  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    check_keys(o, "oracle", {"enabled", "dt", "t_end", "f_in_cells", "fbar_points"});
    cfg.oracle.enabled = get_bool(o, "enabled", "oracle", false);
    cfg.oracle.dt = get_number(o, "dt", "oracle", cfg.oracle.dt);
    cfg.oracle.t_end = get_optional_number(o, "t_end", "oracle");
    cfg.oracle.f_in_cells = get_count(o, "f_in_cells", "oracle", 0);
    cfg.oracle.fbar_points = get_count(o, "fbar_points", "oracle", cfg.oracle.fbar_points);
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    if (!s.is_array()) throw ConfigError("sweep: expected an array of initial conditions");
    for (std::size_t i = 0; i < s.size(); ++i) {
      cfg.sweep.push_back(ic_from_json(s[i], "sweep[" + std::to_string(i) + "]", base_dir));
    }
  }
  cfg.output = get_string(doc, "output", "", cfg.output);

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  return config_from_json(std::move(doc), overrides, path.parent_path());
}

json config_to_json(const RunConfig& cfg) {
  json doc;
  if (cfg.preset) doc["preset"] = *cfg.preset;
  doc["model"] = model_to_json(cfg.model);
  doc["rho"] = cfg.rho;
  doc["initial_condition"] = ic_to_json(cfg.initial);
  doc["grid"] = {{"x_max", cfg.grid.x_max}, {"n_cells", cfg.grid.n_cells}};

  json solver;
  if (cfg.solver.dt) {
    solver["dt"] = *cfg.solver.dt;
  } else {
    solver["dt"] = "auto";
  }
  solver["cfl_safety"] = cfg.solver.cfl_safety;
  solver["t_end"] = cfg.solver.t_end;
  solver["sample_times"] = cfg.solver.sample_times;
  solver["series_stride"] = cfg.solver.series_stride;
  doc["solver"] = solver;

  json lyap = json::array();
  for (const auto& c : cfg.diagnostics.extra_lyapunov) lyap.push_back(c.name());
  doc["diagnostics"] = {
      {"lyapunov", lyap},
      {"fractional_moments", cfg.diagnostics.fractional_moments},
      {"concentration_eps", cfg.diagnostics.concentration_eps},
      {"profile_scaling", cfg.diagnostics.profile_scaling == ProfileScaling::kDivide ? "divide" : "multiply"},
      {"profile_x_min", cfg.diagnostics.profile_x_min},
      {"profile_x_max", cfg.diagnostics.profile_x_max},
      {"profile_points", cfg.diagnostics.profile_points},
  };

  json fit = {{"decades", cfg.fit.decades}};
  fit["t_lo"] = cfg.fit.t_lo ? json(*cfg.fit.t_lo) : json(nullptr);
  fit["t_hi"] = cfg.fit.t_hi ? json(*cfg.fit.t_hi) : json(nullptr);
  doc["fit"] = fit;

  json oracle = {{"enabled", cfg.oracle.enabled},
                 {"dt", cfg.oracle.dt},
                 {"f_in_cells", cfg.oracle.f_in_cells},
                 {"fbar_points", cfg.oracle.fbar_points}};
  oracle["t_end"] = cfg.oracle.t_end ? json(*cfg.oracle.t_end) : json(nullptr);
  doc["oracle"] = oracle;

  json sweep = json::array();
  for (const auto& ic : cfg.sweep) sweep.push_back(ic_to_json(ic));
  doc["sweep"] = sweep;
  doc["output"] = cfg.output;
  return doc;
}

SimState initial_state(const RunConfig& cfg) {
  return SimState(cfg.grid, initial_cell_averages(cfg.initial, cfg.grid), cfg.rho, 0.0);
}

}  // namespace lsn
