#include "andersen/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "andersen/errors.hpp"

namespace andersen {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + value + "' as a number");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + value + "' as a nonnegative integer");
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    // JSON meta sidecar: the run parameters live under "config"
    nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.contains("config") || !j["config"].is_object())
      throw ConfigError("meta sidecar: expected a JSON object with a \"config\" object");
    ConfigMap map;
    for (auto& [key, value] : j["config"].items()) {
      if (!value.is_string()) throw ConfigError("meta sidecar: config values must be strings");
      map[key] = value.get<std::string>();
    }
    return map;
  }
  ConfigMap map;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    map[key] = value;
  }
  return map;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "space.kind",         "space.m",
      "space.n",            "space.ell",
      "potential.variant",  "potential.c_inv",
      "potential.l_g",      "potential.amp_local",
      "potential.amp_pair", "potential.edges",
      "dynamics.lambda",    "dynamics.beta",
      "dynamics.t_end",     "dynamics.flow",
      "dynamics.step",      "coupling.kind",
      "coupling.gamma",     "experiment.replicas",
      "experiment.seed",    "experiment.distance",
      "experiment.initial", "experiment.offset",
      "experiment.record_dt", "experiment.fit_t0",
      "experiment.fit_t1",  "experiment.x0",
      "experiment.v0",      "sweep.axis",
      "sweep.values",       "sweep.at_time",
      "output.csv",         "output.meta",
  };
  return keys;
}

RunConfig RunConfig::from_map(const ConfigMap& map) {
  for (const auto& [key, value] : map) {
    bool known = false;
    for (const auto& k : known_keys())
      if (k == key) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown config key: " + key);
  }
  RunConfig cfg;
  auto str = [&](const char* key, std::string& out) {
    auto it = map.find(key);
    if (it != map.end()) out = it->second;
  };
  auto dbl = [&](const char* key, double& out) {
    auto it = map.find(key);
    if (it != map.end()) out = parse_double(key, it->second);
  };
  auto sz = [&](const char* key, std::size_t& out) {
    auto it = map.find(key);
    if (it != map.end()) out = static_cast<std::size_t>(parse_u64(key, it->second));
  };
  str("space.kind", cfg.space_kind);
  sz("space.m", cfg.m);
  sz("space.n", cfg.n);
  dbl("space.ell", cfg.ell);
  str("potential.variant", cfg.potential_variant);
  str("potential.c_inv", cfg.c_inv);
  dbl("potential.l_g", cfg.l_g);
  dbl("potential.amp_local", cfg.amp_local);
  dbl("potential.amp_pair", cfg.amp_pair);
  str("potential.edges", cfg.edges);
  dbl("dynamics.lambda", cfg.lambda);
  dbl("dynamics.beta", cfg.beta);
  dbl("dynamics.t_end", cfg.t_end);
  str("dynamics.flow", cfg.flow_mode);
  dbl("dynamics.step", cfg.step);
  str("coupling.kind", cfg.coupling_kind);
  str("coupling.gamma", cfg.gamma);
  sz("experiment.replicas", cfg.replicas);
  if (auto it = map.find("experiment.seed"); it != map.end())
    cfg.seed = parse_u64("experiment.seed", it->second);
  str("experiment.distance", cfg.distance);
  str("experiment.initial", cfg.initial);
  dbl("experiment.offset", cfg.offset);
  dbl("experiment.record_dt", cfg.record_dt);
  str("experiment.fit_t0", cfg.fit_t0);
  str("experiment.fit_t1", cfg.fit_t1);
  str("experiment.x0", cfg.x0);
  str("experiment.v0", cfg.v0);
  str("sweep.axis", cfg.sweep_axis);
  str("sweep.values", cfg.sweep_values);
  str("sweep.at_time", cfg.sweep_at_time);
  str("output.csv", cfg.out_csv);
  str("output.meta", cfg.out_meta);
  return cfg;
}

std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

ConfigMap RunConfig::to_map() const {
  ConfigMap map;
  map["space.kind"] = space_kind;
  map["space.m"] = std::to_string(m);
  map["space.n"] = std::to_string(n);
  map["space.ell"] = format_full(ell);
  map["potential.variant"] = potential_variant;
  map["potential.c_inv"] = c_inv;
  map["potential.l_g"] = format_full(l_g);
  map["potential.amp_local"] = format_full(amp_local);
  map["potential.amp_pair"] = format_full(amp_pair);
  map["potential.edges"] = edges;
  map["dynamics.lambda"] = format_full(lambda);
  map["dynamics.beta"] = format_full(beta);
  map["dynamics.t_end"] = format_full(t_end);
  map["dynamics.flow"] = flow_mode;
  map["dynamics.step"] = format_full(step);
  map["coupling.kind"] = coupling_kind;
  map["coupling.gamma"] = gamma;
  map["experiment.replicas"] = std::to_string(replicas);
  map["experiment.seed"] = std::to_string(seed);
  map["experiment.distance"] = distance;
  map["experiment.initial"] = initial;
  map["experiment.offset"] = format_full(offset);
  map["experiment.record_dt"] = format_full(record_dt);
  map["experiment.fit_t0"] = fit_t0;
  map["experiment.fit_t1"] = fit_t1;
  map["experiment.x0"] = x0;
  map["experiment.v0"] = v0;
  map["sweep.axis"] = sweep_axis;
  map["sweep.values"] = sweep_values;
  map["sweep.at_time"] = sweep_at_time;
  map["output.csv"] = out_csv;
  map["output.meta"] = out_meta;
  return map;
}

SpaceSpec RunConfig::make_space() const {
  SpaceSpec s;
  if (space_kind == "euclidean")
    s.kind = SpaceKind::Euclidean;
  else if (space_kind == "torus")
    s.kind = SpaceKind::Torus;
  else
    throw ConfigError("space.kind must be euclidean or torus");
  s.m = m;
  s.n = n;
  s.ell = ell;
  s.validate();
  return s;
}

namespace {

std::vector<double> resolve_c_inv_diag(const std::string& c_inv, std::size_t dim) {
  if (c_inv == "identity") return std::vector<double>(dim, 1.0);
  if (c_inv == "squares") {
    // omega_i = i: the classic ill-conditioned diagonal chain
    std::vector<double> d(dim);
    for (std::size_t i = 0; i < dim; ++i) d[i] = static_cast<double>((i + 1) * (i + 1));
    return d;
  }
  if (c_inv.rfind("diag:", 0) == 0) {
    std::vector<double> d = parse_double_list("potential.c_inv", c_inv.substr(5));
    if (d.size() != dim)
      throw ConfigError("potential.c_inv: expected " + std::to_string(dim) + " diagonal entries");
    return d;
  }
  throw ConfigError("potential.c_inv must be identity, squares, or diag:v1,v2,...");
}

std::vector<std::pair<std::size_t, std::size_t>> resolve_edges(const std::string& edges,
                                                               std::size_t m) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  if (edges.empty() || edges == "none") return e;
  if (edges == "chain" || edges == "ring") {
    for (std::size_t i = 0; i + 1 < m; ++i) e.emplace_back(i, i + 1);
    if (edges == "ring" && m > 2) e.emplace_back(m - 1, 0);
    return e;
  }
  std::stringstream ss(edges);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t dash = item.find('-');
    if (dash == std::string::npos)
      throw ConfigError("potential.edges: expected pairs like 0-1,1-2");
    e.emplace_back(parse_u64("potential.edges", trim(item.substr(0, dash))),
                   parse_u64("potential.edges", trim(item.substr(dash + 1))));
  }
  return e;
}

}  // namespace

std::unique_ptr<Potential> RunConfig::make_potential(const SpaceSpec& space) const {
  if (potential_variant == "zero") return std::make_unique<ZeroPotential>(space.dim());
  if (potential_variant == "quadratic") {
    if (space.kind == SpaceKind::Torus)
      throw ConfigError("quadratic potential is not periodic; use torus_cosine on the torus");
    return std::make_unique<QuadraticPotential>(resolve_c_inv_diag(c_inv, space.dim()));
  }
  if (potential_variant == "quadratic_plus_convex") {
    if (space.kind == SpaceKind::Torus)
      throw ConfigError("quadratic potential is not periodic; use torus_cosine on the torus");
    return std::make_unique<QuadraticPlusConvexPotential>(resolve_c_inv_diag(c_inv, space.dim()),
                                                          l_g);
  }
  if (potential_variant == "torus_cosine") {
    if (space.kind != SpaceKind::Torus) throw ConfigError("torus_cosine needs a torus space");
    return std::make_unique<TorusCosinePotential>(space.m, space.ell, amp_local, amp_pair,
                                                  resolve_edges(edges, space.m));
  }
  throw ConfigError("potential.variant must be zero, quadratic, quadratic_plus_convex, or torus_cosine");
}

PotentialFactory RunConfig::potential_factory() const {
  RunConfig self = *this;
  return [self](const SpaceSpec& space) { return self.make_potential(space); };
}

FlowConfig RunConfig::make_flow() const {
  FlowConfig f;
  if (flow_mode == "exact")
    f.mode = FlowMode::Exact;
  else if (flow_mode == "verlet")
    f.mode = FlowMode::Verlet;
  else
    throw ConfigError("dynamics.flow must be exact or verlet");
  f.step = step;
  return f;
}

AndersenConfig RunConfig::make_andersen() const {
  AndersenConfig a;
  a.lambda = lambda;
  a.beta = beta;
  a.t_end = t_end;
  a.flow = make_flow();
  a.validate();
  return a;
}

ExperimentSpec RunConfig::make_experiment() const {
  ExperimentSpec spec;
  spec.space = make_space();
  spec.coupling.lambda = lambda;
  spec.coupling.beta = beta;
  spec.coupling.t_end = t_end;
  spec.coupling.flow = make_flow();
  if (coupling_kind == "mirror")
    spec.coupling.kind = CouplingKind::Mirror;
  else if (coupling_kind == "synchronous")
    spec.coupling.kind = CouplingKind::Synchronous;
  else
    throw ConfigError("coupling.kind must be mirror or synchronous");
  if (gamma == "auto") {
    if (spec.coupling.kind == CouplingKind::Mirror) {
      if (spec.space.kind != SpaceKind::Torus)
        throw ConfigError("coupling.gamma = auto is defined on the torus; give a number");
      spec.gamma_auto = true;
    }
  } else {
    spec.coupling.gamma = parse_double("coupling.gamma", gamma);
  }
  if (distance == "rho_simple")
    spec.distance = DistanceKind::TorusRhoSimple;
  else if (distance == "rho_theorem")
    spec.distance = DistanceKind::TorusRho;
  else if (distance == "rho_squared_wah")
    spec.distance = DistanceKind::WahRhoSquared;
  else
    throw ConfigError("experiment.distance must be rho_simple, rho_theorem, or rho_squared_wah");
  if (initial == "antipodal")
    spec.initial = InitialKind::Antipodal;
  else if (initial == "offset")
    spec.initial = InitialKind::Offset;
  else if (initial == "stationary_vs_point")
    spec.initial = InitialKind::StationaryVsPoint;
  else
    throw ConfigError("experiment.initial must be antipodal, offset, or stationary_vs_point");
  spec.offset = offset;
  spec.record = make_grid(t_end, record_dt);
  spec.replicas = replicas;
  spec.seed = seed;
  return spec;
}

PhasePoint RunConfig::make_initial_point(const SpaceSpec& space) const {
  PhasePoint y;
  y.x = x0.empty() ? std::vector<double>(space.dim(), 0.0) : parse_double_list("experiment.x0", x0);
  y.v = v0.empty() ? std::vector<double>(space.dim(), 0.0) : parse_double_list("experiment.v0", v0);
  if (y.x.size() != space.dim() || y.v.size() != space.dim())
    throw ConfigError("experiment.x0/v0 must have m*n entries");
  if (space.kind == SpaceKind::Torus) wrap_position(y.x, space.ell);
  return y;
}

double RunConfig::resolve_fit_t0() const {
  return fit_t0 == "auto" ? 0.5 * t_end : parse_double("experiment.fit_t0", fit_t0);
}

double RunConfig::resolve_fit_t1() const {
  return fit_t1 == "auto" ? 0.9 * t_end : parse_double("experiment.fit_t1", fit_t1);
}

double RunConfig::resolve_sweep_at_time() const {
  return sweep_at_time == "auto" ? t_end : parse_double("sweep.at_time", sweep_at_time);
}

SweepAxis RunConfig::resolve_sweep_axis() const {
  if (sweep_axis == "lambda") return SweepAxis::Lambda;
  if (sweep_axis == "m") return SweepAxis::M;
  if (sweep_axis == "gamma") return SweepAxis::Gamma;
  if (sweep_axis == "beta") return SweepAxis::Beta;
  throw ConfigError("sweep.axis must be lambda, m, gamma, or beta");
}

std::vector<double> RunConfig::resolve_sweep_values() const {
  std::vector<double> v = parse_double_list("sweep.values", sweep_values);
  if (v.empty()) throw ConfigError("sweep.values must list at least one value");
  return v;
}

std::string meta_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["tool"] = "andersen";
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [key, value] : cfg.to_map()) c[key] = value;
  j["config"] = c;
  return j.dump(2) + "\n";
}

std::string series_csv(const EstimateSeries& s) {
  std::string out = "t,mean,stderr,count\r\n";
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    out += format_full(s.t[k]) + "," + format_full(s.mean[k]) + "," + format_full(s.se[k]) + "," +
           std::to_string(s.count[k]) + "\r\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,mean_at_t,stderr_at_t,rate,r_squared\r\n";
  for (const auto& r : rows) {
    out += format_full(r.value) + "," + format_full(r.mean_at_t) + "," + format_full(r.se_at_t) +
           "," + format_full(r.rate) + "," + format_full(r.r_squared) + "\r\n";
  }
  return out;
}

std::string trajectory_csv(const std::vector<double>& t, const std::vector<PhasePoint>& states) {
  std::string out = "t";
  if (!states.empty()) {
    for (std::size_t i = 0; i < states[0].x.size(); ++i) out += ",x" + std::to_string(i);
    for (std::size_t i = 0; i < states[0].v.size(); ++i) out += ",v" + std::to_string(i);
  }
  out += "\r\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += format_full(t[k]);
    for (double xi : states[k].x) out += "," + format_full(xi);
    for (double vi : states[k].v) out += "," + format_full(vi);
    out += "\r\n";
  }
  return out;
}

}  // namespace andersen
