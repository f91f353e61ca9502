// Copyright 2026 The STA Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <toml.hpp>

#include "sta/acceptance.hpp"
#include "sta/classical.hpp"
#include "sta/io.hpp"
#include "sta/meanfield.hpp"
#include "sta/morse_oracle.hpp"
#include "sta/quantum.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace sta::cli {

// -- potentials and schedules -------------------------------------------------------------

namespace {

double to_number(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
    throw UsageError(what + ": '" + text + "' is not a finite number");
  return v;
}

}  // namespace

PotentialSpec parse_potential(std::string_view text, double mass) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string_view::npos) {
    std::stringstream ss{std::string(text.substr(colon + 1))};
    for (std::string item; std::getline(ss, item, ',');) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("potential parameter '" + item + "' is not key=value");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  const auto take = [&](const std::string& key, double def) {
    const auto it = kv.find(key);
    if (it == kv.end()) return def;
    const double v = to_number(it->second, "potential parameter " + key);
    kv.erase(it);
    return v;
  };

  std::optional<Shape> shape;
  if (name == "harmonic") {
    shape = Harmonic{take("omega0", 1.0)};
  } else if (name == "quartic") {
    const double a2 = take("alpha2", 0.5);
    shape = Quartic{a2, take("alpha4", 0.05)};
  } else if (name == "power-law") {
    const double A = take("A", 1.0);
    const double b = take("b", 4.0);
    if (b != std::round(b)) throw UsageError("power-law exponent b must be an integer");
    shape = PowerLaw{A, static_cast<int>(b)};
  } else if (name == "morse") {
    const double Um = take("Um", 1.0);
    shape = Morse{Um, take("beta", 1.0)};
  } else if (name == "poschl-teller") {
    const double l = take("lambda", 2.0);
    shape = PoschlTeller{l, take("alpha", 1.0)};
  } else if (name == "gaussian-well") {
    const double A = take("A", 12.0);
    shape = GaussianWell{A, take("alpha", 0.3)};
  } else if (name == "optical-lattice") {
    const double A = take("A", 1.0);
    shape = OpticalLattice{A, take("alpha", 1.0)};
  } else if (name == "finite-square-well") {
    const double A = take("A", 1.0);
    shape = FiniteSquareWell{A, take("half_width", 1.0)};
  } else if (name == "box") {
    shape = Box{take("L", 1.0)};
  } else if (name == "series") {
    Series s;
    if (const auto it = kv.find("alpha"); it != kv.end()) {
      std::stringstream ss(it->second);
      for (std::string c; std::getline(ss, c, ';');) s.alpha.push_back(to_number(c, "series coefficient"));
      kv.erase(it);
    }
    if (s.alpha.empty()) throw UsageError("series potential needs alpha=a0;a1;...");
    shape = s;
  } else {
    throw UsageError("unknown potential '" + name +
                     "' (harmonic, quartic, power-law, morse, poschl-teller, gaussian-well, optical-lattice, "
                     "finite-square-well, box, series)");
  }
  if (!kv.empty()) throw UsageError("unknown parameter '" + kv.begin()->first + "' for potential '" + name + "'");
  try {
    return PotentialSpec(*shape, mass);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("potential '") + std::string(text) + "': " + e.what());
  }
}

DriveSchedule parse_schedule(std::string_view kind, double gamma_final, double f_final, double tau_final) {
  try {
    if (kind == "quintic") return make_quintic_schedule(gamma_final, f_final, tau_final);
    if (kind == "cubic") return make_cubic_schedule(gamma_final, f_final, tau_final);
    if (kind == "constant") return DriveSchedule::constant(tau_final);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("schedule: ") + e.what());
  }
  throw UsageError("unknown schedule '" + std::string(kind) + "' (cubic, quintic, constant)");
}

// -- config files ----------------------------------------------------------------------------

namespace {

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

void add_entry(std::vector<ConfigEntry>& out, ConfigEntry e) {
  for (const auto& o : out)
    if (o.key == e.key) throw UsageError(e.where + ": field '" + e.key + "' repeats " + o.where);
  out.push_back(std::move(e));
}

nlohmann::json toml_leaf(const toml::node& n, const std::string& where, const std::string& key) {
  if (const auto* v = n.as_integer()) return v->get();
  if (const auto* v = n.as_floating_point()) return v->get();
  if (const auto* v = n.as_boolean()) return v->get();
  if (const auto* v = n.as_string()) return v->get();
  throw UsageError(where + ": field '" + key + "' must be a number, boolean or string");
}

void flatten_toml(const toml::table& t, const std::string& file, std::vector<ConfigEntry>& out) {
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    const std::string where = file + ":" + std::to_string(node.source().begin.line);
    if (const auto* sub = node.as_table()) {
      flatten_toml(*sub, file, out);
    } else if (const auto* arr = node.as_array()) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& item : *arr) a.push_back(toml_leaf(item, where, key));
      add_entry(out, {dashed(key), a, where});
    } else {
      add_entry(out, {dashed(key), toml_leaf(node, where, key), where});
    }
  }
}

void flatten_json(const nlohmann::ordered_json& j, const std::string& file, std::vector<ConfigEntry>& out) {
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      flatten_json(v, file, out);
      continue;
    }
    if (v.is_null()) throw UsageError(file + ": field '" + k + "' is null");
    if (v.is_array())
      for (const auto& item : v)
        if (item.is_structured() || item.is_null())
          throw UsageError(file + ": field '" + k + "' must hold numbers, booleans or strings");
    add_entry(out, {dashed(k), v, file});
  }
}

}  // namespace

std::vector<ConfigEntry> load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string file = path.string();
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = path.extension() == ".json" || (path.extension() != ".toml" && first != std::string::npos &&
                                                    text[first] == '{');
  std::vector<ConfigEntry> out;
  if (json) {
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      // translate the byte offset into line:column
      std::size_t line = 1, col = 1;
      for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      throw UsageError(file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
    }
    if (!j.is_object()) throw UsageError(file + ":1:1: a config file holds one JSON object");
    flatten_json(j, file, out);
  } else {
    try {
      const auto tbl = toml::parse(text, file);
      flatten_toml(tbl, file, out);
      // toml++ tables iterate in key order; report entries in document order
      const auto line = [](const ConfigEntry& e) { return std::stoul(e.where.substr(e.where.rfind(':') + 1)); };
      std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return line(a) < line(b); });
    } catch (const toml::parse_error& e) {
      throw UsageError(file + ":" + std::to_string(e.source().begin.line) + ":" +
                       std::to_string(e.source().begin.column) + ": " + std::string(e.description()));
    }
  }
  return out;
}

// -- run reports ------------------------------------------------------------------------------

namespace {

using acceptance::Metric;

Metric assertion(std::string name, double value, std::string rel, double bound) {
  Metric m{std::move(name), value, bound, std::move(rel), true};
  if (m.relation == "<") m.pass = value < bound;
  else if (m.relation == "<=") m.pass = value <= bound;
  else if (m.relation == ">") m.pass = value > bound;
  else if (m.relation == ">=") m.pass = value >= bound;
  if (m.relation != "info" && std::isnan(value)) m.pass = false;
  return m;
}

Metric info(std::string name, double value) { return Metric{std::move(name), value, 0.0, "info", true}; }

struct Context {
  fs::path dir;
  std::string subcommand;
  std::vector<Metric> assertions;
  std::vector<std::string> artifacts;
  std::optional<ojson> custom_report;

  void write(const std::string& name, std::string_view content) {
    io::write_file(dir / name, content);
    artifacts.push_back(name);
  }
  bool pass() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Metric& m) { return m.pass; });
  }
};

ojson metric_json(const Metric& m) {
  ojson e;
  e["name"] = m.name;
  e["value"] = m.value;
  e["relation"] = m.relation;
  if (m.relation != "info") e["bound"] = m.bound;
  e["pass"] = m.pass;
  return e;
}

/// Writes config.resolved.json, runs the body, writes report.json. Module errors give exit 1 and keep
/// whatever artifacts were written.
int execute(const fs::path& root, const std::string& name, const ojson& resolved, bool assert_mode,
            const std::function<void(Context&)>& body) {
  Context ctx{root / name, name, {}, {}, std::nullopt};
  ctx.write("config.resolved.json", resolved.dump(2) + "\n");
  std::string error;
  try {
    body(ctx);
  } catch (const std::exception& e) {
    error = e.what();
  }
  ojson rep;
  if (ctx.custom_report) {
    rep["subcommand"] = name;
    rep["pass"] = error.empty() && ctx.pass();
    rep.update(*ctx.custom_report);
    rep["artifacts"] = ctx.artifacts;
  } else {
    rep["subcommand"] = name;
    rep["pass"] = error.empty() && ctx.pass();
    rep["assertions"] = ojson::array();
    for (const auto& m : ctx.assertions) rep["assertions"].push_back(metric_json(m));
    rep["artifacts"] = ctx.artifacts;
  }
  if (!error.empty()) rep["error"] = error;
  io::write_file(ctx.dir / "report.json", rep.dump(2) + "\n");

  for (const auto& m : ctx.assertions)
    std::cout << (m.relation == "info" ? "info" : (m.pass ? "PASS" : "FAIL")) << "  " << m.name << " = "
              << io::format_number(m.value)
              << (m.relation == "info" ? "" : "  (" + m.relation + " " + io::format_number(m.bound) + ")") << "\n";
  std::cerr << "artifacts in " << ctx.dir.string() << "\n";
  if (!error.empty()) {
    std::cerr << "error: " << error << "\n";
    return kExitAssertion;
  }
  return assert_mode && !ctx.pass() ? kExitAssertion : kExitPass;
}

// -- settings ---------------------------------------------------------------------------------

struct DriveSettings {
  std::string schedule = "quintic";
  double gamma_final = 2.0;
  double f_final = 0.0;
  double tau_final = std::numbers::pi;

  void add(CLI::App* sub, bool with_kind) {
    if (with_kind) sub->add_option("--schedule", schedule, "cubic | quintic | constant")->capture_default_str();
    sub->add_option("--gamma-final", gamma_final, "final dilation gamma_F")->capture_default_str();
    sub->add_option("--f-final", f_final, "final translation f_F")->capture_default_str();
    sub->add_option("--tau-final", tau_final, "protocol duration tau_F")->capture_default_str();
  }
  void to_json(ojson& j, bool with_kind) const {
    if (with_kind) j["schedule"] = schedule;
    j["gamma-final"] = gamma_final;
    j["f-final"] = f_final;
    j["tau-final"] = tau_final;
  }
  DriveSchedule build() const { return parse_schedule(schedule, gamma_final, f_final, tau_final); }
};

struct ClassicalSettings {
  std::string potential = "morse";
  double mass = 0.5;
  std::string frame = "cd_H";
  DriveSettings drive{"quintic", 2.0, 0.0, 3.0};
  double q0 = 0.3, p0 = 0.2;
  double tol = 1e-12;
  std::size_t samples = 401;
  bool assert_mode = false;
};

struct BoxSettings {
  double L0 = 1.0, L1 = 2.0, t0 = 0.5, t1 = 3.5, t_end = 4.5;
  double q0 = 0.4, p0 = 1.3, mass = 1.0;
  std::size_t samples = 901;
  bool assert_mode = false;
};

struct QuantumSettings {
  std::string potential = "harmonic";
  double mass = 1.0;
  int n = 0;
  DriveSettings drive;
  std::size_t grid_points = 1024;
  std::vector<double> extent;
  double dt = 1e-3;
  bool control = true;
  std::size_t samples = 201;
  std::size_t snapshots = 5;
  std::string method = "spectral";
  bool assert_mode = false;
};

struct GpeSettings {
  std::string model = "gpe";
  double g0 = 10.0;
  double particles = 1.0;
  std::string potential = "harmonic";
  double mass = 1.0;
  DriveSettings drive;
  bool freeze_coupling = false;
  std::size_t grid_points = 1024;
  std::vector<double> extent;
  double dt = 1e-3;
  std::size_t samples = 201;
  std::size_t snapshots = 5;
  bool assert_mode = false;
};

struct ScheduleSettings {
  DriveSettings drive{"quintic", 2.0, 0.0, 1.0};
  std::size_t samples = 1000;
  double omega0 = 1.0;
  bool assert_mode = false;
};

struct AcceptanceSettings {
  std::vector<int> criteria;
  unsigned jobs = 1;
  bool assert_mode = false;
};

// -- runners ----------------------------------------------------------------------------------

std::vector<double> column(const Trajectory& tr, double (*get)(const TrajectorySample&)) {
  std::vector<double> v;
  for (const auto& s : tr.samples) v.push_back(get(s));
  return v;
}

void run_classical(const ClassicalSettings& s, const PotentialSpec& spec, const DriveSchedule& sched, Frame frame,
                   Context& ctx) {
  const DrivenPotential dp{spec, sched};
  IntegratorConfig cfg;
  cfg.tolerance = s.tol;
  cfg.samples = s.samples;
  // q0, p0 are physical (bare-frame) coordinates at t = 0
  PhasePoint z0{s.q0, s.p0};
  if (frame == Frame::local_Hbar) z0 = to_local(z0, sched, 0.0, spec.mass);
  if (frame == Frame::tilde_Htilde) z0 = to_tilde(z0, sched, 0.0);
  const auto tr = integrate(frame, dp, z0, 0.0, sched.duration(), cfg);
  ctx.write("trajectory.csv", io::trajectory_csv(tr));
  if (!tr.complete) throw std::runtime_error("integration stopped early: " + tr.failure);

  io::Plot p;
  p.title = "phase portrait (" + std::string(to_string(frame)) + ")";
  p.xlabel = "q";
  p.ylabel = "p";
  p.series.push_back({"trajectory", column(tr, [](const TrajectorySample& x) { return x.z.q; }),
                      column(tr, [](const TrajectorySample& x) { return x.z.p; })});
  ctx.write("phase_portrait.svg", io::svg_plot(p));

  const double w0 = tr.samples.front().omega, w1 = tr.samples.back().omega;
  double drift = 0.0;
  for (const auto& x : tr.samples) drift = std::max(drift, std::abs(x.omega - w0) / std::abs(w0));
  io::Plot w;
  w.title = "adiabatic invariant";
  w.xlabel = "t";
  w.ylabel = "omega / omega(0)";
  w.series.push_back({"omega", column(tr, [](const TrajectorySample& x) { return x.t; }), {}});
  for (const auto& x : tr.samples) w.series.back().y.push_back(x.omega / w0);
  ctx.write("omega.svg", io::svg_plot(w));

  const double endpoint = std::abs(w1 - w0) / std::abs(w0);
  if (frame == Frame::cd_H) {
    ctx.assertions.push_back(assertion("omega_max_relative_drift", drift, "<", 1e-7));
  } else {
    ctx.assertions.push_back(info("omega_max_relative_change", drift));
  }
  if (frame == Frame::bare_H0)
    ctx.assertions.push_back(info("omega_endpoint_relative_change", endpoint));
  else
    ctx.assertions.push_back(assertion("omega_endpoint_relative_change", endpoint, "<", 1e-7));
}

void run_box(const BoxSettings& s, Context& ctx) {
  const BoxProtocol box{s.L0, s.L1, s.t0, s.t1};
  const PhasePoint z0{s.q0, s.p0};
  const auto cd = box_simulate(box, z0, Frame::cd_H, 0.0, s.t_end, s.mass, s.samples);
  const auto loc = box_simulate(box, z0, Frame::local_Hbar, 0.0, s.t_end, s.mass, s.samples);
  ctx.write("box_trajectory_cd.csv", io::trajectory_csv(cd.trajectory));
  ctx.write("box_trajectory_local.csv", io::trajectory_csv(loc.trajectory));
  ctx.write("box_events.csv", io::box_events_csv(loc.events));

  // energy shells |p| = L0 |p0| / L (dotted) and the sheared lines p + m u q / L that the local frame follows
  io::Plot p;
  p.title = "time-dependent box: energy shells and invariant lines";
  p.xlabel = "q";
  p.ylabel = "p";
  const double P = s.L0 * std::abs(s.p0);
  const double u = box.rate();
  for (int k = 0; k <= 4; ++k) {
    const double t = s.t0 + (s.t1 - s.t0) * k / 4.0;
    const double L = box.width(t);
    for (double sign : {1.0, -1.0}) {
      p.series.push_back({k == 0 && sign > 0 ? "shells" : "", {0.0, L}, {sign * P / L, sign * P / L}, "#7f7f7f",
                          false, true});
      p.series.push_back({k == 0 && sign > 0 ? "sheared lines" : "", {0.0, L},
                          {sign * P / L, sign * P / L + s.mass * u}, "#ff7f0e"});
    }
  }
  io::Series a{"cd_H", {}, {}, "#1f77b4", true};
  io::Series b{"local_Hbar", {}, {}, "#2ca02c", true};
  for (const auto& x : cd.trajectory.samples) {
    a.x.push_back(x.z.q);
    a.y.push_back(x.z.p);
  }
  for (const auto& x : loc.trajectory.samples) {
    b.x.push_back(x.z.q);
    b.y.push_back(x.z.p);
  }
  p.series.push_back(a);
  p.series.push_back(b);
  ctx.write("box_demo.svg", io::svg_plot(p));

  double lp = 0.0;
  for (const auto& x : cd.trajectory.samples) lp = std::max(lp, std::abs(box.width(x.t) * std::abs(x.z.p) - P) / P);
  const double E0 = 0.5 * s.p0 * s.p0 / s.mass;
  const double pe = cd.trajectory.samples.back().z.p;
  const double ratio = 0.5 * pe * pe / s.mass / E0;
  const double expect = (s.L0 / s.L1) * (s.L0 / s.L1);
  double shell = 0.0;
  for (const auto& x : loc.trajectory.samples)
    if (x.t > s.t1) shell = std::max(shell, std::abs(0.5 * x.z.p * x.z.p / s.mass - E0 * expect) / (E0 * expect));
  ctx.assertions.push_back(assertion("L_abs_p_max_relative_variation", lp, "<", 1e-9));
  ctx.assertions.push_back(assertion("energy_ratio_deviation", std::abs(ratio - expect), "<", 1e-6));
  ctx.assertions.push_back(assertion("post_t1_bare_shell_relative_deviation", shell, "<", 1e-8));
}

void run_quantum(const QuantumSettings& s, const PotentialSpec& spec, const DriveSchedule& sched, Context& ctx) {
  QuantumRunConfig cfg;
  cfg.grid_points = s.grid_points;
  if (s.extent.size() == 2) cfg.extent = std::pair{s.extent[0], s.extent[1]};
  cfg.dt = s.dt;
  cfg.control = s.control;
  cfg.samples = s.samples;
  cfg.snapshots = s.snapshots;
  cfg.method = s.method == "finite_difference" ? EigenMethod::finite_difference : EigenMethod::spectral;
  const auto rep = shortcut_run(spec, sched, s.n, cfg);
  ctx.write("invariant.csv", io::invariant_csv(rep.cd));
  if (s.control) ctx.write("control.csv", io::invariant_csv(rep.control));
  ctx.write("densities.svg", io::svg_waterfall(rep.grid, rep.snapshots, "density snapshots, n = " + std::to_string(s.n)));

  io::Plot p;
  p.title = "fidelity";
  p.xlabel = "t";
  p.ylabel = "F";
  io::Series u{"CD vs U target", {}, {}, "#1f77b4"}, t{"CD vs target", {}, {}, "#2ca02c", false, true},
      c{"control vs target", {}, {}, "#d62728"};
  for (const auto& x : rep.cd) {
    u.x.push_back(x.t);
    u.y.push_back(x.F_vs_Utarget);
    t.x.push_back(x.t);
    t.y.push_back(x.F_vs_target);
  }
  for (const auto& x : rep.control) {
    c.x.push_back(x.t);
    c.y.push_back(x.F_vs_target);
  }
  p.series = {u, t};
  if (s.control) p.series.push_back(c);
  ctx.write("fidelity.svg", io::svg_plot(p));

  ctx.assertions.push_back(assertion("endpoint_fidelity", rep.F_end, ">=", 0.999));
  ctx.assertions.push_back(assertion("min_fidelity_vs_U_target", rep.min_F_vs_Utarget, ">=", 0.999));
  ctx.assertions.push_back(assertion("max_norm_error", rep.max_norm_error, "<", 1e-10));
  ctx.assertions.push_back(info("E_n", rep.E_n));
  if (s.control) ctx.assertions.push_back(info("control_endpoint_fidelity", rep.F_control_end));
}

void run_gpe(const GpeSettings& s, const PotentialSpec& spec, const DriveSchedule& sched, const NonlinearModel& model,
             Context& ctx) {
  MeanFieldRunConfig cfg;
  cfg.grid_points = s.grid_points;
  if (s.extent.size() == 2) cfg.extent = std::pair{s.extent[0], s.extent[1]};
  cfg.dt = s.dt;
  cfg.freeze_coupling = s.freeze_coupling;
  cfg.samples = s.samples;
  cfg.snapshots = s.snapshots;
  const auto rep = meanfield_run(model, {spec, sched}, cfg);
  ctx.write("gpe.csv", io::meanfield_csv(rep.samples));
  ctx.write("densities.svg", io::svg_waterfall(rep.grid, rep.snapshots, std::string(to_string(model.kind)) +
                                                                            " density waterfall"));
  if (s.freeze_coupling) {
    // the frozen-coupling run is the control; its residual is the measurement
    ctx.assertions.push_back(info("max_R", rep.max_R));
    ctx.assertions.push_back(info("endpoint_fidelity", rep.F_end));
  } else {
    ctx.assertions.push_back(assertion("max_R", rep.max_R, "<", 1e-3));
    ctx.assertions.push_back(assertion("min_fidelity_vs_U_target", rep.min_F, ">=", 0.999));
    ctx.assertions.push_back(assertion("endpoint_fidelity", rep.F_end, ">=", 0.999));
  }
  ctx.assertions.push_back(assertion("max_norm_error", rep.max_norm_error, "<", 1e-10));
  ctx.assertions.push_back(info("mu", rep.mu));
}

void run_schedule(const ScheduleSettings& s, const DriveSchedule& sched, Context& ctx) {
  const auto csv = io::schedule_csv(sched, s.samples, s.omega0);
  ctx.write("schedule.csv", csv);
  io::Plot p;
  p.title = "schedule";
  p.xlabel = "t";
  p.ylabel = "value";
  io::Series g{"gamma", {}, {}, "#1f77b4"}, f{"f", {}, {}, "#ff7f0e"}, tau{"tau", {}, {}, "#2ca02c", false, true};
  std::vector<double> t(s.samples);
  for (std::size_t k = 0; k < s.samples; ++k) t[k] = sched.duration() * static_cast<double>(k) / (s.samples - 1);
  const auto taus = tau_on_grid(sched, t);
  for (std::size_t k = 0; k < s.samples; ++k) {
    const auto x = sched.local(t[k]);
    g.x.push_back(t[k]);
    g.y.push_back(x.gamma);
    f.x.push_back(t[k]);
    f.y.push_back(x.f);
    tau.x.push_back(t[k]);
    tau.y.push_back(taus[k]);
  }
  p.series = {g, f, tau};
  ctx.write("schedule.svg", io::svg_plot(p));

  const auto a = sched.local(0.0), b = sched.local(sched.duration());
  double bc = std::max({std::abs(a.gamma - 1.0), std::abs(a.dgamma), std::abs(a.f), std::abs(a.df)});
  if (sched.kind() != ScheduleKind::constant)
    bc = std::max({bc, std::abs(b.gamma - s.drive.gamma_final), std::abs(b.dgamma), std::abs(b.f - s.drive.f_final),
                   std::abs(b.df)});
  if (sched.kind() == ScheduleKind::quintic)
    bc = std::max({bc, std::abs(a.ddgamma), std::abs(b.ddgamma), std::abs(a.ddf), std::abs(b.ddf)});
  ctx.assertions.push_back(assertion("boundary_condition_max_abs", bc, "<=", 1e-12));
  ctx.assertions.push_back(info("tau_final_value", taus.back()));
}

void run_acceptance(const AcceptanceSettings& s, Context& ctx) {
  std::vector<int> ids = s.criteria;
  if (ids.empty())
    for (int id = 1; id <= acceptance::kCriteria; ++id) ids.push_back(id);
  for (int id : ids)
    if (id < 1 || id > acceptance::kCriteria) throw UsageError("criterion must be in 1.." + std::to_string(acceptance::kCriteria));
  std::vector<acceptance::CriterionResult> results(ids.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < ids.size();) results[i] = acceptance::run_criterion(ids[i]);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(s.jobs, static_cast<unsigned>(ids.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ojson all = ojson::array();
  for (const auto& r : results) {
    std::cout << acceptance::summary_line(r) << "\n";
    all.push_back(ojson::parse(acceptance::result_json(r)));
    ctx.assertions.push_back(assertion("criterion_" + std::to_string(r.id), r.pass ? 1.0 : 0.0, ">=", 1.0));
  }
  ctx.write("acceptance.json", all.dump(2) + "\n");
}

// -- argument assembly -------------------------------------------------------------------------

const std::vector<std::string> kGlobalKeys{"output-dir", "seed"};

std::string value_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return io::format_number(v.get<double>());
  return v.dump();
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
  for (const auto& a : args)
    if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0 || a == "--no-" + key) return true;
  return false;
}

/// Config entries as command-line tokens. Entries the user also gave on the command line are skipped so
/// the command line wins.
std::vector<std::string> config_tokens(const std::vector<ConfigEntry>& entries, CLI::App* scope,
                                       const std::vector<std::string>& user_args) {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (given_on_command_line(user_args, e.key)) continue;
    CLI::Option* opt = scope->get_option_no_throw("--" + e.key);
    if (opt == nullptr)
      throw UsageError(e.where + ": unknown field '" + e.key + "'" +
                       (scope->get_name().empty() ? "" : " for subcommand '" + scope->get_name() + "'"));
    if (opt->get_items_expected_max() == 0) {
      if (!e.value.is_boolean()) throw UsageError(e.where + ": field '" + e.key + "' expects true or false");
      if (e.value.get<bool>()) {
        out.push_back("--" + e.key);
      } else if (scope->get_option_no_throw("--no-" + e.key) != nullptr) {
        out.push_back("--no-" + e.key);
      }
      continue;
    }
    const std::string type = opt->get_type_name();
    const auto values = e.value.is_array() ? e.value : nlohmann::json::array({e.value});
    for (const auto& v : values) {
      const bool numeric = type.find("FLOAT") != std::string::npos || type.find("INT") != std::string::npos ||
                           type.find("UINT") != std::string::npos;
      if (numeric && !v.is_number())
        throw UsageError(e.where + ": field '" + e.key + "' expects a number, got " + v.dump());
      if (!numeric && v.is_boolean())
        throw UsageError(e.where + ": field '" + e.key + "' expects a value, got " + v.dump());
    }
    out.push_back("--" + e.key);
    for (const auto& v : values) out.push_back(value_text(v));
  }
  return out;
}

}  // namespace

// -- entry point -------------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"Shortcut-to-adiabaticity experiments: classical, quantum and mean-field counterdiabatic driving",
               "sta"};
  app.require_subcommand(1);
  std::string output_dir = "sta_output";
  std::string config_path;
  std::uint64_t seed = 20260101;
  app.add_option("--output-dir", output_dir, "output root (STA_OUTPUT_DIR overrides)")->capture_default_str();
  app.add_option("--config", config_path, "TOML or JSON file whose keys are option names");
  app.add_option("--seed", seed, "seed for sampled shell points")->capture_default_str();

  ClassicalSettings cs;
  auto* c_run = app.add_subcommand("classical-run", "integrate one trajectory in a chosen frame");
  c_run->add_option("--potential", cs.potential, "name[:key=value,...]")->capture_default_str();
  c_run->add_option("--mass", cs.mass)->capture_default_str();
  c_run->add_option("--frame", cs.frame, "bare_H0 | cd_H | local_Hbar | tilde_Htilde")->capture_default_str();
  cs.drive.add(c_run, true);
  c_run->add_option("--q0", cs.q0, "initial position (bare frame)")->capture_default_str();
  c_run->add_option("--p0", cs.p0, "initial momentum (bare frame)")->capture_default_str();
  c_run->add_option("--tol", cs.tol, "integrator tolerance")->capture_default_str();
  c_run->add_option("--samples", cs.samples)->capture_default_str();
  c_run->add_flag("--assert", cs.assert_mode, "exit 1 when an assertion fails");

  BoxSettings bs;
  auto* b_run = app.add_subcommand("box-demo", "dilation CD in a box with a moving wall");
  b_run->add_option("--L0", bs.L0)->capture_default_str();
  b_run->add_option("--L1", bs.L1)->capture_default_str();
  b_run->add_option("--t0", bs.t0, "ramp start")->capture_default_str();
  b_run->add_option("--t1", bs.t1, "ramp end")->capture_default_str();
  b_run->add_option("--t-end", bs.t_end)->capture_default_str();
  b_run->add_option("--q0", bs.q0)->capture_default_str();
  b_run->add_option("--p0", bs.p0)->capture_default_str();
  b_run->add_option("--mass", bs.mass)->capture_default_str();
  b_run->add_option("--samples", bs.samples)->capture_default_str();
  b_run->add_flag("--assert", bs.assert_mode, "exit 1 when an assertion fails");

  QuantumSettings qs;
  auto* q_run = app.add_subcommand("quantum-run", "split-step shortcut run for eigenstate n");
  q_run->add_option("--potential", qs.potential, "name[:key=value,...]")->capture_default_str();
  q_run->add_option("--mass", qs.mass)->capture_default_str();
  q_run->add_option("--n", qs.n, "eigenstate index")->capture_default_str()->check(CLI::NonNegativeNumber);
  qs.drive.add(q_run, false);
  q_run->add_option("--grid-points", qs.grid_points, "power of two >= 256")->capture_default_str();
  q_run->add_option("--extent", qs.extent, "q_min q_max (automatic when absent)")->expected(2);
  q_run->add_option("--dt", qs.dt)->capture_default_str();
  q_run->add_flag("--control,!--no-control", qs.control, "also run the uncorrected protocol")->capture_default_str();
  q_run->add_option("--samples", qs.samples)->capture_default_str();
  q_run->add_option("--snapshots", qs.snapshots)->capture_default_str();
  q_run->add_option("--method", qs.method, "spectral | finite_difference")->capture_default_str();
  q_run->add_flag("--assert", qs.assert_mode, "exit 1 when an assertion fails");

  GpeSettings gs;
  auto* g_run = app.add_subcommand("gpe-run", "mean-field shortcut run (GPE or Kolomeisky)");
  g_run->add_option("--model", gs.model, "gpe | kolomeisky")->capture_default_str();
  g_run->add_option("--g0", gs.g0, "initial GPE coupling")->capture_default_str();
  g_run->add_option("--particles", gs.particles, "Kolomeisky particle number")->capture_default_str();
  g_run->add_option("--potential", gs.potential, "name[:key=value,...]")->capture_default_str();
  g_run->add_option("--mass", gs.mass)->capture_default_str();
  gs.drive.add(g_run, false);
  g_run->add_flag("--freeze-coupling", gs.freeze_coupling, "control: keep g at g0");
  g_run->add_option("--grid-points", gs.grid_points)->capture_default_str();
  g_run->add_option("--extent", gs.extent, "q_min q_max (automatic when absent)")->expected(2);
  g_run->add_option("--dt", gs.dt)->capture_default_str();
  g_run->add_option("--samples", gs.samples)->capture_default_str();
  g_run->add_option("--snapshots", gs.snapshots)->capture_default_str();
  g_run->add_flag("--assert", gs.assert_mode, "exit 1 when an assertion fails");

  auto* m_run = app.add_subcommand("morse-verify", "Morse closed-form oracle suite (exit 1 on failure)");

  ScheduleSettings ss;
  auto* s_run = app.add_subcommand("schedule-export", "sample a drive schedule to CSV");
  ss.drive.add(s_run, true);
  s_run->add_option("--samples", ss.samples)->capture_default_str();
  s_run->add_option("--omega0", ss.omega0, "trap frequency for omega_sq_cd")->capture_default_str();
  s_run->add_flag("--assert", ss.assert_mode, "exit 1 when an assertion fails");

  auto* k_run = app.add_subcommand("catalog-dump", "scale-invariant potential catalog as JSON");

  AcceptanceSettings as;
  auto* a_run = app.add_subcommand("acceptance", "run acceptance criteria");
  a_run->add_option("--criterion", as.criteria, "criterion id (repeatable; default all)");
  a_run->add_option("--jobs", as.jobs, "criteria run in parallel")->capture_default_str();
  a_run->add_flag("--assert", as.assert_mode, "exit 1 when a criterion fails");

  // -- assemble arguments: config values first, command line after -------------------------
  std::vector<std::string> user(argv + 1, argv + argc);
  std::vector<std::string> args{argv[0]};
  try {
    std::optional<std::string> cfg_file;
    std::size_t sub_pos = user.size();
    for (std::size_t i = 0; i < user.size(); ++i) {
      const auto& a = user[i];
      if (a == "--config" && i + 1 < user.size()) cfg_file = user[i + 1];
      if (a.rfind("--config=", 0) == 0) cfg_file = a.substr(9);
      if ((a == "--config" || a == "--output-dir" || a == "--seed") && i + 1 < user.size()) {
        ++i;
        continue;
      }
      if (sub_pos == user.size() && !a.empty() && a[0] != '-') sub_pos = i;
    }
    std::vector<std::string> global_user(user.begin(), user.begin() + static_cast<std::ptrdiff_t>(sub_pos));
    std::vector<std::string> sub_user(user.begin() + static_cast<std::ptrdiff_t>(sub_pos), user.end());
    std::vector<std::string> cfg_global, cfg_sub;
    std::string sub_name = sub_user.empty() ? "" : sub_user.front();
    if (cfg_file) {
      auto entries = load_config(*cfg_file);
      std::vector<ConfigEntry> globals, locals;
      for (auto& e : entries) {
        if (e.key == "subcommand") {
          if (!e.value.is_string()) throw UsageError(e.where + ": field 'subcommand' must be a string");
          if (sub_name.empty()) {
            sub_name = e.value.get<std::string>();
            sub_user.insert(sub_user.begin(), sub_name);
          } else if (sub_name != e.value.get<std::string>()) {
            throw UsageError(e.where + ": config is for '" + e.value.get<std::string>() + "', not '" + sub_name + "'");
          }
          continue;
        }
        (std::find(kGlobalKeys.begin(), kGlobalKeys.end(), e.key) != kGlobalKeys.end() ? globals : locals)
            .push_back(e);
      }
      cfg_global = config_tokens(globals, &app, global_user);
      if (!locals.empty()) {
        CLI::App* sub = nullptr;
        try {
          sub = app.get_subcommand(sub_name);
        } catch (const CLI::OptionNotFound&) {
          throw UsageError(*cfg_file + ": no subcommand given (set 'subcommand' or pass one)");
        }
        cfg_sub = config_tokens(locals, sub, sub_user);
      }
    }
    args.insert(args.end(), cfg_global.begin(), cfg_global.end());
    args.insert(args.end(), global_user.begin(), global_user.end());
    if (!sub_user.empty()) {
      args.push_back(sub_user.front());
      args.insert(args.end(), cfg_sub.begin(), cfg_sub.end());
      args.insert(args.end(), sub_user.begin() + 1, sub_user.end());
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<char*> cargv;
  for (auto& a : args) cargv.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (const char* env = std::getenv("STA_OUTPUT_DIR"); env != nullptr && *env != '\0') output_dir = env;
  const fs::path root(output_dir);
  ojson resolved;
  resolved["output-dir"] = output_dir;
  resolved["seed"] = seed;

  try {
    if (*c_run) {
      const auto spec = parse_potential(cs.potential, cs.mass);
      if (is_box(spec)) throw UsageError("the box runs through box-demo");
      const auto sched = cs.drive.build();
      Frame frame;
      try {
        frame = frame_from_string(cs.frame);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      resolved["subcommand"] = "classical-run";
      resolved["potential"] = cs.potential;
      resolved["mass"] = cs.mass;
      resolved["frame"] = cs.frame;
      cs.drive.to_json(resolved, true);
      resolved["q0"] = cs.q0;
      resolved["p0"] = cs.p0;
      resolved["tol"] = cs.tol;
      resolved["samples"] = cs.samples;
      return execute(root, "classical-run", resolved, cs.assert_mode,
                     [&](Context& ctx) { run_classical(cs, spec, sched, frame, ctx); });
    }
    if (*b_run) {
      if (!(bs.L0 > 0 && bs.L1 > 0 && bs.t1 > bs.t0 && bs.t_end > 0)) throw UsageError("box-demo: need L0, L1 > 0, t1 > t0");
      resolved["subcommand"] = "box-demo";
      for (auto [k, v] : {std::pair{"L0", bs.L0}, {"L1", bs.L1}, {"t0", bs.t0}, {"t1", bs.t1}, {"t-end", bs.t_end},
                          {"q0", bs.q0}, {"p0", bs.p0}, {"mass", bs.mass}})
        resolved[k] = v;
      resolved["samples"] = bs.samples;
      return execute(root, "box-demo", resolved, bs.assert_mode, [&](Context& ctx) { run_box(bs, ctx); });
    }
    if (*q_run) {
      const auto spec = parse_potential(qs.potential, qs.mass);
      const auto sched = qs.drive.build();
      if (qs.method != "spectral" && qs.method != "finite_difference")
        throw UsageError("--method must be spectral or finite_difference");
      resolved["subcommand"] = "quantum-run";
      resolved["potential"] = qs.potential;
      resolved["mass"] = qs.mass;
      resolved["n"] = qs.n;
      qs.drive.to_json(resolved, false);
      resolved["grid-points"] = qs.grid_points;
      if (!qs.extent.empty()) resolved["extent"] = qs.extent;
      resolved["dt"] = qs.dt;
      resolved["control"] = qs.control;
      resolved["samples"] = qs.samples;
      resolved["snapshots"] = qs.snapshots;
      resolved["method"] = qs.method;
      return execute(root, "quantum-run", resolved, qs.assert_mode,
                     [&](Context& ctx) { run_quantum(qs, spec, sched, ctx); });
    }
    if (*g_run) {
      const auto spec = parse_potential(gs.potential, gs.mass);
      const auto sched = gs.drive.build();
      NonlinearModel model;
      try {
        model = nonlinear_kind_from_string(gs.model) == NonlinearKind::gpe ? NonlinearModel::gpe(gs.g0)
                                                                           : NonlinearModel::kolomeisky(gs.particles);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      resolved["subcommand"] = "gpe-run";
      resolved["model"] = gs.model;
      resolved["g0"] = gs.g0;
      resolved["particles"] = gs.particles;
      resolved["potential"] = gs.potential;
      resolved["mass"] = gs.mass;
      gs.drive.to_json(resolved, false);
      resolved["freeze-coupling"] = gs.freeze_coupling;
      resolved["grid-points"] = gs.grid_points;
      if (!gs.extent.empty()) resolved["extent"] = gs.extent;
      resolved["dt"] = gs.dt;
      resolved["samples"] = gs.samples;
      resolved["snapshots"] = gs.snapshots;
      return execute(root, "gpe-run", resolved, gs.assert_mode,
                     [&](Context& ctx) { run_gpe(gs, spec, sched, model, ctx); });
    }
    if (*m_run) {
      resolved["subcommand"] = "morse-verify";
      return execute(root, "morse-verify", resolved, true, [&](Context& ctx) {
        const auto rep = morse::run_suite(seed);
        ctx.custom_report = ojson::parse(morse::report_json(rep));
        for (const auto& c : rep.checks)
          if (!c.pass) ctx.assertions.push_back(assertion(c.mode + "/" + c.check, c.max_residual, "<", c.tolerance));
        ctx.assertions.push_back(assertion("checks_passed", static_cast<double>(rep.passed()), ">=", 12.0));
        ctx.assertions.push_back(assertion("checks_failed", static_cast<double>(rep.checks.size() - rep.passed()), "<=", 0.0));
      });
    }
    if (*s_run) {
      const auto sched = ss.drive.build();
      if (ss.samples < 2) throw UsageError("--samples must be at least 2");
      resolved["subcommand"] = "schedule-export";
      ss.drive.to_json(resolved, true);
      resolved["samples"] = ss.samples;
      resolved["omega0"] = ss.omega0;
      return execute(root, "schedule-export", resolved, ss.assert_mode,
                     [&](Context& ctx) { run_schedule(ss, sched, ctx); });
    }
    if (*k_run) {
      resolved["subcommand"] = "catalog-dump";
      return execute(root, "catalog-dump", resolved, false, [&](Context& ctx) {
        const auto json = catalog_json();
        ctx.write("catalog.json", json + "\n");
        std::cout << json << "\n";
      });
    }
    if (*a_run) {
      for (int id : as.criteria)
        if (id < 1 || id > acceptance::kCriteria)
          throw UsageError("--criterion must be in 1.." + std::to_string(acceptance::kCriteria));
      resolved["subcommand"] = "acceptance";
      resolved["criterion"] = as.criteria;
      resolved["jobs"] = as.jobs;
      return execute(root, "acceptance", resolved, as.assert_mode, [&](Context& ctx) { run_acceptance(as, ctx); });
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    // failures before any run starts (for example an unwritable output directory)
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
  return kExitUsage;
}

}  // namespace sta::cli
