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

#include "sta/morse_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/trapezoidal.hpp>
#include <boost/numeric/odeint.hpp>
#include <json.hpp>

#include "sta/errors.hpp"

namespace sta::morse {

namespace odeint = boost::numeric::odeint;
using std::numbers::pi;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::scale: return "scale";
    case Mode::width: return "width";
    case Mode::depth: return "depth";
  }
  return "unknown";
}

Mode mode_from_string(std::string_view name) {
  if (name == "scale") return Mode::scale;
  if (name == "width") return Mode::width;
  if (name == "depth") return Mode::depth;
  throw std::invalid_argument("unknown Morse mode '" + std::string(name) + "'");
}

MorseDrive::MorseDrive(Mode m, double v, double r) : mode(m), value(v), rate(r) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("Morse drive parameter must be positive");
}

double MorseDrive::depth() const {
  switch (mode) {
    case Mode::scale: return 1.0 / (value * value);
    case Mode::width: return 1.0;
    case Mode::depth: return value;
  }
  return 1.0;
}

double MorseDrive::beta() const { return mode == Mode::scale ? 1.0 / value : mode == Mode::width ? value : 1.0; }

PotentialSpec to_spec(const MorseDrive& d) { return PotentialSpec(Morse{d.depth(), d.beta()}, kMass); }

double potential(const MorseDrive& d, double q) {
  const double x = std::exp(-d.beta() * q);
  return d.depth() * (x * x - 2.0 * x);
}

double force_gradient(const MorseDrive& d, double q) {
  const double b = d.beta(), x = std::exp(-b * q);
  return 2.0 * b * d.depth() * (x - x * x);
}

double hamiltonian(const MorseDrive& d, PhasePoint z) { return z.p * z.p / (2.0 * kMass) + potential(d, z.q); }

double parameter_derivative(const MorseDrive& d, double q) {
  switch (d.mode) {
    case Mode::scale: {
      const double g = d.value;
      return -2.0 * potential(d, q) / g - q / g * force_gradient(d, q);
    }
    case Mode::width: {
      const double x = std::exp(-d.value * q);
      return 2.0 * q * (x - x * x);
    }
    case Mode::depth: {
      const double x = std::exp(-q);
      return x * x - 2.0 * x;
    }
  }
  return 0.0;
}

namespace {

void check_energy(const MorseDrive& d, double E, bool allow_zero) {
  const double bottom = d.well_bottom();
  const bool ok = std::isfinite(E) && E >= bottom * (1.0 + 1e-15) && (allow_zero ? E <= 0.0 : E < 0.0);
  if (!ok)
    throw std::out_of_range("energy " + std::to_string(E) + " outside the bound range [" + std::to_string(bottom) +
                            ", 0) of the " + std::string(to_string(d.mode)) + " mode");
}

// s = sqrt(1 + E/D), clamped at the well bottom
double shell_s(const MorseDrive& d, double E) { return std::sqrt(std::max(0.0, 1.0 + E / d.depth())); }

}  // namespace

double omega_closed_form(const MorseDrive& d, double E) {
  check_energy(d, E, false);
  const double a = std::max(0.0, -E);
  switch (d.mode) {
    case Mode::scale: return 2.0 * pi * (1.0 - std::sqrt(a * d.value * d.value));
    case Mode::width: return 2.0 * pi / d.value * (1.0 - std::sqrt(a));
    case Mode::depth: return 2.0 * pi * (std::sqrt(d.value) - std::sqrt(a));
  }
  return 0.0;
}

double omega_width_quoted(double beta, double E) {
  return 2.0 * pi * (1.0 / (beta * beta) - std::sqrt(-E) / beta);
}

double omega_quadrature(const MorseDrive& d, double E) {
  check_energy(d, E, false);
  if (E <= d.well_bottom()) return 0.0;
  return phase_space_volume(to_spec(d), E);
}

MorseTurningPoints turning_points(const MorseDrive& d, double E) {
  check_energy(d, E, true);
  const double s = shell_s(d, E), b = d.beta();
  MorseTurningPoints tp;
  tp.q1 = -std::log1p(s) / b;
  if (E == 0.0) {
    tp.q2 = std::numeric_limits<double>::infinity();
    tp.unbounded = true;
  } else {
    // 1 - s = -(E/D)/(1 + s) avoids cancellation near dissociation
    tp.q2 = -std::log((-E / d.depth()) / (1.0 + s)) / b;
  }
  return tp;
}

PhasePoint shell_point(const MorseDrive& d, double E, double theta) {
  check_energy(d, E, false);
  const double s = shell_s(d, E);
  const double x = 1.0 - s * std::sin(theta);
  return {-std::log(x) / d.beta(), std::sqrt(2.0 * kMass * d.depth()) * s * std::cos(theta)};
}

double xi_closed_form(const MorseDrive& d, PhasePoint z) {
  if (d.mode == Mode::scale) return z.q * z.p / d.value;
  const double H = hamiltonian(d, z);
  if (!(H <= 0.0)) throw OutOfDomain("xi closed form needs a bound point (H0 <= 0)");
  const double a = -H, D = d.depth(), b = d.beta();
  const double x = std::exp(-b * z.q);
  const double sd = std::sqrt(D);
  const std::complex<double> z1(z.p, (1.0 - x) * sd);
  const std::complex<double> z2(std::sqrt(a) * z.p, D * x - a);
  const double theta = std::arg(z1 * z2);
  if (d.mode == Mode::width) return -z.q * z.p / b + (theta - z.p) / (b * b);
  return z.p / (2.0 * D) - theta / (2.0 * sd);
}

double mean_force_closed_form(const MorseDrive& d, double E) {
  check_energy(d, E, false);
  const double a = -E;
  switch (d.mode) {
    case Mode::scale: return -2.0 * E / d.value;
    case Mode::width: return 2.0 / d.value * (std::sqrt(a) - a);
    case Mode::depth: return -std::sqrt(a / d.value);
  }
  return 0.0;
}

namespace {

// On the shell x = e^{-bq} = 1 - s sin(theta) and dt = m/(b sqrt(2mD)) dtheta/x, so orbit averages are
// integrals of smooth periodic functions of theta and the trapezoidal rule converges geometrically.
double orbit_integral(const std::function<double(double)>& g) {
  return boost::math::quadrature::trapezoidal(g, -pi, pi, 1e-15, 24);
}

}  // namespace

double microcanonical_average(const std::function<double(PhasePoint)>& obs, const MorseDrive& d, double E) {
  check_energy(d, E, false);
  const double s = shell_s(d, E);
  const auto w = [&](double th) { return 1.0 / (1.0 - s * std::sin(th)); };
  const double num = orbit_integral([&](double th) { return obs(shell_point(d, E, th)) * w(th); });
  const double den = orbit_integral(w);
  return num / den;
}

double orbit_period(const MorseDrive& d, double E) {
  check_energy(d, E, false);
  const double s = shell_s(d, E);
  const double k = kMass / (d.beta() * std::sqrt(2.0 * kMass * d.depth()));
  return k * orbit_integral([&](double th) { return 1.0 / (1.0 - s * std::sin(th)); });
}

std::size_t unwrap(std::vector<double>& values, double period) {
  std::size_t jumps = 0;
  double shift = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double raw = values[k] + shift;
    const double step = raw - values[k - 1];
    if (std::abs(step) > 0.5 * period) {
      const double n = std::round(step / period);
      shift -= n * period;
      ++jumps;
    }
    values[k] += shift;
  }
  return jumps;
}

namespace {

using State2 = std::array<double, 2>;
using State3 = std::array<double, 3>;

State2 flow_rhs(const MorseDrive& d, const State2& y) { return {y[1] / kMass, -force_gradient(d, y[0])}; }

// Classical RK4 over a short flow time; used only for the derivative stencil.
PhasePoint rk4_flow(const MorseDrive& d, PhasePoint z, double h, int steps) {
  State2 y{z.q, z.p};
  const double dt = h / steps;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = flow_rhs(d, y);
    const auto k2 = flow_rhs(d, {y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]});
    const auto k3 = flow_rhs(d, {y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]});
    const auto k4 = flow_rhs(d, {y[0] + dt * k3[0], y[1] + dt * k3[1]});
    for (int j = 0; j < 2; ++j) y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return {y[0], y[1]};
}

double xi_partial(const MorseDrive& d, PhasePoint z, int which, double h) {
  const auto at = [&](double delta) {
    PhasePoint w = z;
    (which == 0 ? w.q : w.p) += delta;
    return xi_closed_form(d, w);
  };
  return (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
}

}  // namespace

PdeResidual xi_pde_residual(const MorseDrive& d, PhasePoint z, const PdeConfig& cfg) {
  const double E = hamiltonian(d, z);
  const double mean = mean_force_closed_form(d, E);
  const double T = orbit_period(d, E);
  const std::size_t n = std::max<std::size_t>(cfg.samples, 8);

  std::vector<PhasePoint> path;
  path.reserve(n);
  State2 y{z.q, z.p};
  auto stepper = odeint::make_controlled(cfg.tolerance, cfg.tolerance, odeint::runge_kutta_dopri5<State2>());
  const auto rhs = [&](const State2& s, State2& dy, double) { dy = flow_rhs(d, s); };
  double t = 0.0;
  const double dt = T / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    path.push_back({y[0], y[1]});
    odeint::integrate_adaptive(stepper, rhs, y, t, t + dt, dt / 10.0);
    t += dt;
  }

  PdeResidual r;
  r.samples = n;
  std::vector<double> xis;
  xis.reserve(n);
  double s_flow = 0.0, s_br = 0.0;
  const double h = cfg.fd_step;
  for (const auto& w : path) {
    xis.push_back(xi_closed_form(d, w));
    const auto x_at = [&](double dtau) { return xi_closed_form(d, rk4_flow(d, w, dtau, 4)); };
    const double dxi = (8.0 * (x_at(h) - x_at(-h)) - (x_at(2 * h) - x_at(-2 * h))) / (12.0 * h);

    double dq, dp;
    if (d.mode == Mode::scale) {
      dq = w.p / d.value;
      dp = w.q / d.value;
    } else {
      dq = xi_partial(d, w, 0, cfg.bracket_step);
      dp = xi_partial(d, w, 1, cfg.bracket_step);
    }
    const double bracket = dq * (w.p / kMass) - dp * force_gradient(d, w.q);

    const double source = parameter_derivative(d, w.q) - mean;
    const double e1 = dxi - source, e2 = bracket - source;
    s_flow += e1 * e1;
    s_br += e2 * e2;
    r.max_abs = std::max({r.max_abs, std::abs(e1), std::abs(e2)});
  }
  r.rms_flow = std::sqrt(s_flow / n);
  r.rms_bracket = std::sqrt(s_br / n);

  // the angle term carries the only possible branch cut
  const double period = d.mode == Mode::width ? 2.0 * pi / (d.beta() * d.beta())
                        : d.mode == Mode::depth ? pi / std::sqrt(d.depth())
                                                : std::numeric_limits<double>::infinity();
  if (std::isfinite(period)) r.branch_jumps = unwrap(xis, period);
  for (std::size_t k = 1; k < xis.size(); ++k) r.max_step = std::max(r.max_step, std::abs(xis[k] - xis[k - 1]));
  return r;
}

IncrementCheck generator_increment_check(const MorseDrive& d, PhasePoint z_a, PhasePoint z_b) {
  const double Ea = hamiltonian(d, z_a), Eb = hamiltonian(d, z_b);
  if (!(std::abs(Ea - Eb) < 1e-10)) throw std::invalid_argument("points are not on a common energy shell");
  IncrementCheck c;
  c.closed_form = xi_closed_form(d, z_b) - xi_closed_form(d, z_a);
  if (z_a.q == z_b.q && z_a.p == z_b.p) {
    c.discrepancy = std::abs(c.closed_form);
    return c;
  }
  const double mean = mean_force_closed_form(d, Ea);
  const double T = orbit_period(d, Ea);

  // Event: q passes q_b moving with the sign of p_b, or p passes zero at a turning point.
  const double p_scale = std::sqrt(2.0 * kMass * d.depth());
  const bool turning = std::abs(z_b.p) < 1e-12 * p_scale;
  const double dir = turning ? (-force_gradient(d, z_b.q) > 0.0 ? 1.0 : -1.0) : (z_b.p > 0.0 ? 1.0 : -1.0);
  const auto g = [&](const State3& y) { return dir * (turning ? y[1] : y[0] - z_b.q); };
  // the p-event fires at both turning points; accept the one nearest q_b
  const auto accept = [&](const State3& y) {
    return !turning || std::abs(y[0] - z_b.q) < 1e-3 * (1.0 + std::abs(z_b.q));
  };

  const auto rhs = [&](const State3& y, State3& dy, double) {
    dy[0] = y[1] / kMass;
    dy[1] = -force_gradient(d, y[0]);
    dy[2] = parameter_derivative(d, y[0]) - mean;
  };
  auto stepper = odeint::make_dense_output(1e-14, 1e-14, odeint::runge_kutta_dopri5<State3>());
  stepper.initialize(State3{z_a.q, z_a.p, 0.0}, 0.0, T / 2000.0);
  double g_prev = g(stepper.current_state());
  while (stepper.current_time() < 2.0 * T) {
    const auto [t0, t1] = stepper.do_step(rhs);
    const double g_cur = g(stepper.current_state());
    if (g_prev < 0.0 && g_cur >= 0.0 && accept(stepper.current_state())) {
      double lo = t0, hi = t1;
      State3 y;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, y);
        (g(y) < 0.0 ? lo : hi) = mid;
      }
      stepper.calc_state(hi, y);
      c.elapsed = hi;
      c.integral = y[2];
      c.discrepancy = std::abs(c.integral - c.closed_form);
      return c;
    }
    g_prev = g_cur;
  }
  throw ConvergenceError("flow from z_a did not reach z_b within two periods");
}

// -- suite ---------------------------------------------------------------------

bool OracleReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.pass; });
}

std::size_t OracleReport::passed() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.pass; }));
}

namespace {

constexpr std::array<double, 5> kParams{0.5, 0.8, 1.0, 1.5, 2.0};

std::vector<double> energy_grid(const MorseDrive& d, std::size_t n = 20) {
  std::vector<double> E(n);
  for (std::size_t k = 0; k < n; ++k) E[k] = d.well_bottom() * (0.975 - 0.95 * k / (n - 1.0));
  return E;
}

void add(OracleReport& r, Mode m, std::string check, double residual, double tol) {
  r.checks.push_back({std::string(to_string(m)), std::move(check), residual, tol, residual < tol});
}

}  // namespace

OracleReport run_suite(std::uint64_t seed) {
  OracleReport rep;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U01(0.0, 1.0);

  for (Mode mode : {Mode::scale, Mode::width, Mode::depth}) {
    double omega_err = 0.0, tp_err = 0.0, root_err = 0.0, mean_err = 0.0, norm_err = 0.0;
    for (double v : kParams) {
      const MorseDrive d(mode, v);
      const PotentialSpec spec = to_spec(d);
      for (double E : energy_grid(d)) {
        const double w = omega_closed_form(d, E);
        omega_err = std::max(omega_err, std::abs(omega_quadrature(d, E) - w) / w);
        if (mode == Mode::width)
          rep.quoted_width_omega_deviation =
              std::max(rep.quoted_width_omega_deviation, std::abs(omega_width_quoted(v, E) - w) / w);

        const auto tp = turning_points(d, E);
        tp_err = std::max({tp_err, std::abs(potential(d, tp.q1) - E), std::abs(potential(d, tp.q2) - E)});
        const auto num = shell_turning_points(spec, E);
        root_err = std::max({root_err, std::abs(num.q1 - tp.q1), std::abs(num.q2 - tp.q2)});

        const double avg = microcanonical_average([&](PhasePoint z) { return parameter_derivative(d, z.q); }, d, E);
        const double ref = mean_force_closed_form(d, E);
        mean_err = std::max(mean_err, std::abs(avg - ref) / std::abs(ref));
        norm_err = std::max(norm_err, std::abs(microcanonical_average([](PhasePoint) { return 1.0; }, d, E) - 1.0));
      }
    }
    add(rep, mode, "omega_closed_form_vs_quadrature", omega_err, 1e-8);
    add(rep, mode, "turning_points_on_shell", tp_err, 1e-12);
    add(rep, mode, "turning_points_vs_root_finder", root_err, 1e-10);
    add(rep, mode, "mean_force_identity", mean_err, 1e-7);
    add(rep, mode, "average_normalization", norm_err, 1e-12);

    double pde = 0.0, br = 0.0, jumps = 0.0, pair_err = 0.0, half_err = 0.0;
    for (double v : {0.7, 1.0, 1.6}) {
      const MorseDrive d(mode, v);
      for (int trial = 0; trial < 3; ++trial) {
        const double E = d.well_bottom() * (0.1 + 0.8 * U01(rng));
        const double th = -pi + 2.0 * pi * U01(rng);
        const auto res = xi_pde_residual(d, shell_point(d, E, th));
        pde = std::max(pde, res.rms_flow);
        br = std::max(br, res.rms_bracket);
        jumps += static_cast<double>(res.branch_jumps);

        const PhasePoint za = shell_point(d, E, -pi + 2.0 * pi * U01(rng));
        const PhasePoint zb = shell_point(d, E, -pi + 2.0 * pi * U01(rng));
        pair_err = std::max(pair_err, generator_increment_check(d, za, zb).discrepancy);

        const auto tp = turning_points(d, E);
        half_err = std::max(half_err, generator_increment_check(d, {tp.q1, 0.0}, {tp.q2, 0.0}).discrepancy);
      }
    }
    const double pde_tol = mode == Mode::scale ? 1e-8 : 1e-5;
    add(rep, mode, "xi_pde_residual_flow", pde, pde_tol);
    add(rep, mode, "xi_pde_residual_bracket", br, pde_tol);
    add(rep, mode, "xi_branch_continuity", jumps, 0.5);
    add(rep, mode, "xi_increment_random_pairs", pair_err, mode == Mode::scale ? 1e-7 : 1e-6);
    add(rep, mode, "xi_increment_half_period", half_err, 1e-6);
  }

  // scale mode at f = 0 is the generic dilation generator (q - f) p / gamma
  double gen = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double g = 0.5 + 1.5 * U01(rng);
    const PhasePoint z{-1.0 + 3.0 * U01(rng), -1.0 + 2.0 * U01(rng)};
    gen = std::max(gen, std::abs(xi_closed_form(MorseDrive(Mode::scale, g), z) - (z.q - 0.0) * z.p / g));
  }
  add(rep, Mode::scale, "xi_matches_dilation_generator", gen, 1e-15);

  // width and depth reduce to the unit well at parameter 1
  double same = 0.0;
  for (double E : energy_grid(MorseDrive(Mode::scale, 1.0))) {
    const double w = omega_closed_form(MorseDrive(Mode::scale, 1.0), E);
    same = std::max({same, std::abs(omega_closed_form(MorseDrive(Mode::width, 1.0), E) - w),
                     std::abs(omega_closed_form(MorseDrive(Mode::depth, 1.0), E) - w)});
  }
  add(rep, Mode::width, "unit_parameter_agrees_with_scale", same, 1e-15);
  return rep;
}

std::string report_json(const OracleReport& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  j["failed"] = r.checks.size() - r.passed();
  j["quoted_width_omega_max_relative_deviation"] = r.quoted_width_omega_deviation;
  auto& arr = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks)
    arr.push_back({{"mode", c.mode}, {"check", c.check}, {"max_residual", c.max_residual},
                   {"tolerance", c.tolerance}, {"pass", c.pass}});
  return j.dump(2);
}

}  // namespace sta::morse
