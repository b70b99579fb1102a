#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "andersen/harness.hpp"
#include "andersen/process.hpp"

namespace andersen {

// Flat dotted-key configuration, e.g. "space.kind = torus".  The same keys
// appear under "config" in the JSON meta sidecar a run writes next to its
// CSV, and that sidecar is itself accepted as a config file, so a run can be
// reproduced from its own metadata.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

struct RunConfig {
  // space.*
  std::string space_kind = "euclidean";
  std::size_t m = 1;
  std::size_t n = 1;
  double ell = 1.0;
  // potential.*
  std::string potential_variant = "zero";
  std::string c_inv = "identity";  // identity | squares | diag:v1,v2,...
  double l_g = 0.0;
  double amp_local = 1.0;
  double amp_pair = 0.0;
  std::string edges = "none";  // none | chain | ring | explicit "0-1,1-2"
  // dynamics.*
  double lambda = 1.0;
  double beta = 1.0;
  double t_end = 1.0;
  std::string flow_mode = "exact";
  double step = 0.0;  // <= 0 selects the automatic Verlet step
  // coupling.*
  std::string coupling_kind = "mirror";
  std::string gamma = "auto";  // auto | numeric value
  // experiment.*
  std::size_t replicas = 10000;
  std::uint64_t seed = 1;
  std::string distance = "rho_simple";
  std::string initial = "antipodal";
  double offset = 1.0;
  double record_dt = 0.25;
  std::string fit_t0 = "auto";  // auto: 0.5 * t_end
  std::string fit_t1 = "auto";  // auto: 0.9 * t_end
  std::string x0;  // single-copy start, comma-separated; empty means zeros
  std::string v0;
  // sweep.*
  std::string sweep_axis = "lambda";
  std::string sweep_values;
  std::string sweep_at_time = "auto";  // auto: t_end
  // output.*
  std::string out_csv;   // empty: CSV to stdout
  std::string out_meta;  // empty: no sidecar

  static const std::vector<std::string>& known_keys();
  static RunConfig from_map(const ConfigMap& map);  // rejects unknown keys
  ConfigMap to_map() const;                         // canonical full echo

  SpaceSpec make_space() const;
  std::unique_ptr<Potential> make_potential(const SpaceSpec& space) const;
  PotentialFactory potential_factory() const;
  FlowConfig make_flow() const;
  AndersenConfig make_andersen() const;
  ExperimentSpec make_experiment() const;  // includes the record grid
  PhasePoint make_initial_point(const SpaceSpec& space) const;

  double resolve_fit_t0() const;
  double resolve_fit_t1() const;
  double resolve_sweep_at_time() const;
  SweepAxis resolve_sweep_axis() const;
  std::vector<double> resolve_sweep_values() const;
};

// 17 significant digits, enough to reproduce the double exactly.
std::string format_full(double x);

std::string meta_json(const RunConfig& cfg);

// Lines end with CRLF; numeric cells use format_full.
std::string series_csv(const EstimateSeries& s);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string trajectory_csv(const std::vector<double>& t, const std::vector<PhasePoint>& states);

}  // namespace andersen
