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

#include "sta/classical.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "sta/errors.hpp"

namespace sta {

namespace odeint = boost::numeric::odeint;

std::string_view to_string(Frame f) {
  switch (f) {
    case Frame::bare_H0: return "bare";
    case Frame::cd_H: return "cd";
    case Frame::local_Hbar: return "local";
    case Frame::tilde_Htilde: return "tilde";
  }
  return "unknown";
}

Frame frame_from_string(std::string_view name) {
  if (name == "bare" || name == "bare_H0") return Frame::bare_H0;
  if (name == "cd" || name == "cd_H") return Frame::cd_H;
  if (name == "local" || name == "local_Hbar") return Frame::local_Hbar;
  if (name == "tilde" || name == "tilde_Htilde") return Frame::tilde_Htilde;
  throw std::invalid_argument("unknown frame '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Shell geometry

double potential_argmin(const PotentialSpec& spec) {
  if (const auto* b = std::get_if<Box>(&spec.shape)) return 0.5 * b->L;
  if (const auto* v = std::get_if<Quartic>(&spec.shape)) {
    if (v->alpha2 < 0.0) return std::sqrt(-v->alpha2 / (2.0 * v->alpha4));
    return 0.0;
  }
  if (std::holds_alternative<Series>(spec.shape) || std::holds_alternative<Custom>(spec.shape)) {
    double best = 0.0, lo = eval_U0(spec, 0.0);
    for (int i = -4000; i <= 4000; ++i) {
      const double x = 0.0025 * i;
      const double u = eval_U0(spec, x);
      if (u < lo) lo = u, best = x;
    }
    auto r = boost::math::tools::brent_find_minima([&](double x) { return eval_U0(spec, x); },
                                                   best - 0.0025, best + 0.0025, 50);
    return r.first;
  }
  return 0.0;
}

namespace {

double find_wall(const PotentialSpec& spec, double E, double x0, double dir) {
  double x = x0;
  double h = 1e-3;
  while (std::abs(x - x0) < 1e8) {
    const double xn = x + dir * h;
    const double un = eval_U0(spec, xn);
    if (un > E) {
      auto g = [&](double y) { return eval_U0(spec, y) - E; };
      double a = x, b = xn;
      double ga = g(a), gb = un - E;
      if (!std::isfinite(gb)) {
        // Hard wall: bisect on finiteness first.
        for (int i = 0; i < 200 && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a)); ++i) {
          const double m = 0.5 * (a + b);
          const double gm = g(m);
          (gm > 0.0 ? b : a) = m;
        }
        return 0.5 * (a + b);
      }
      if (ga == 0.0) return a;
      boost::uintmax_t iters = 200;
      auto lo = std::min(a, b), hi = std::max(a, b);
      auto glo = lo == a ? ga : gb, ghi = lo == a ? gb : ga;
      auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                 boost::math::tools::eps_tolerance<double>(52), iters);
      return 0.5 * (r.first + r.second);
    }
    x = xn;
    h *= 1.1;
  }
  throw NoTurningPoint("motion at E = " + std::to_string(E) + " is unbounded");
}

}  // namespace

TurningPoints shell_turning_points(const PotentialSpec& spec, double E, std::optional<double> x_inside) {
  if (const auto* b = std::get_if<Box>(&spec.shape)) {
    if (E < 0.0) throw std::out_of_range("energy below the box floor");
    return {0.0, b->L};
  }
  double x0 = x_inside ? *x_inside : potential_argmin(spec);
  const double u0 = eval_U0(spec, x0);
  if (E <= u0) {
    if (u0 - E > 1e-12 * (1.0 + std::abs(E)))
      throw std::out_of_range("energy " + std::to_string(E) + " lies below the potential at the start point");
    // Start point sits on the shell itself (a turning point): step downhill into the allowed region.
    const double slope = eval_dU0(spec, x0);
    if (slope == 0.0) return {x0, x0};
    const double dir = slope > 0.0 ? -1.0 : 1.0;
    bool inside = false;
    for (double h = 1e-10 * (1.0 + std::abs(x0)); h < 1.0; h *= 2.0) {
      if (eval_U0(spec, x0 + dir * h) < E) {
        x0 += dir * h;
        inside = true;
        break;
      }
    }
    if (!inside) return {x0, x0};
  }
  return {find_wall(spec, E, x0, -1.0), find_wall(spec, E, x0, +1.0)};
}

double phase_space_volume(const PotentialSpec& spec, double E, double gamma, double f,
                          LoopConvention convention, std::optional<double> x_inside) {
  (void)f;  // translation does not change the shell area
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double Es = gamma * gamma * E;
  const double loops = convention == LoopConvention::full_loop ? 2.0 : 1.0;
  const double m = spec.mass;
  if (const auto* b = std::get_if<Box>(&spec.shape)) {
    if (Es < 0.0) throw std::out_of_range("energy below the box floor");
    return loops * b->L * std::sqrt(2.0 * m * Es);
  }
  const TurningPoints tp = shell_turning_points(spec, Es, x_inside);
  if (tp.q2 <= tp.q1) return 0.0;
  boost::math::quadrature::tanh_sinh<double> quad(12);
  auto integrand = [&](double x) { return std::sqrt(std::max(0.0, 2.0 * m * (Es - eval_U0(spec, x)))); };
  return loops * quad.integrate(integrand, tp.q1, tp.q2, 1e-13);
}

double orbit_period(const PotentialSpec& spec, double E, std::optional<double> x_inside) {
  const double m = spec.mass;
  if (const auto* b = std::get_if<Box>(&spec.shape)) return 2.0 * b->L * m / std::sqrt(2.0 * m * E);
  const TurningPoints tp = shell_turning_points(spec, E, x_inside);
  if (tp.q2 <= tp.q1) throw std::out_of_range("degenerate shell has no period");
  boost::math::quadrature::tanh_sinh<double> quad(12);
  auto integrand = [&](double x) {
    const double k = 2.0 * m * (E - eval_U0(spec, x));
    return k > 0.0 ? m / std::sqrt(k) : 0.0;
  };
  return 2.0 * quad.integrate(integrand, tp.q1, tp.q2, 1e-10);
}

double adiabatic_invariant(const DrivenPotential& dp, PhasePoint z, double t, LoopConvention convention) {
  const ScheduleSample x = dp.schedule.local(t);
  const double xq = (z.q - x.f) / x.gamma;
  if (const auto* b = std::get_if<Box>(&dp.spec.shape)) {
    const double loops = convention == LoopConvention::full_loop ? 2.0 : 1.0;
    return loops * x.gamma * b->L * std::abs(z.p);
  }
  // gamma^2 H0(z) is the scaled shell energy, so omega = Omega(I, 1, 0).
  const double Es = x.gamma * x.gamma * z.p * z.p / (2.0 * dp.spec.mass) + eval_U0(dp.spec, xq);
  return phase_space_volume(dp.spec, Es, 1.0, 0.0, convention, xq);
}

// ---------------------------------------------------------------------------
// Hamiltonians, invariants, maps

double hamiltonian_value(Frame frame, const PotentialSpec& spec, const ScheduleSample& x, PhasePoint z) {
  const double m = spec.mass;
  const double kin = z.p * z.p / (2.0 * m);
  switch (frame) {
    case Frame::bare_H0: return kin + driven_U(spec, x, z.q);
    case Frame::cd_H:
      return kin + driven_U(spec, x, z.q) + x.dgamma / x.gamma * (z.q - x.f) * z.p + x.df * z.p;
    case Frame::local_Hbar: return kin + local_cd_U(spec, x, z.q);
    case Frame::tilde_Htilde: return (kin + eval_U0(spec, z.q)) / (x.gamma * x.gamma);
  }
  return 0.0;
}

double hamiltonian_value(Frame frame, const DrivenPotential& dp, PhasePoint z, double t) {
  return hamiltonian_value(frame, dp.spec, dp.schedule.local(t), z);
}

namespace {

double invariant_from_sample(Frame frame, const PotentialSpec& spec, const ScheduleSample& x, PhasePoint z) {
  const double m = spec.mass;
  const double g = x.gamma;
  switch (frame) {
    case Frame::bare_H0:
    case Frame::cd_H: return g * g * z.p * z.p / (2.0 * m) + eval_U0(spec, (z.q - x.f) / g);
    case Frame::local_Hbar: {
      const double k = z.p - m * x.dgamma / g * (z.q - x.f) - m * x.df;
      return g * g / (2.0 * m) * k * k + eval_U0(spec, (z.q - x.f) / g);
    }
    case Frame::tilde_Htilde: return z.p * z.p / (2.0 * m) + eval_U0(spec, z.q);
  }
  return 0.0;
}

}  // namespace

double invariant_I(Frame frame, const DrivenPotential& dp, PhasePoint z, double t) {
  if (frame == Frame::bare_H0) throw std::invalid_argument("I is not invariant under the bare Hamiltonian");
  return invariant_from_sample(frame, dp.spec, dp.schedule.local(t), z);
}

PhasePoint to_local(PhasePoint z, const ScheduleSample& x, double m) {
  return {z.q, z.p + m * x.df + m * x.dgamma / x.gamma * (z.q - x.f)};
}
PhasePoint from_local(PhasePoint zb, const ScheduleSample& x, double m) {
  return {zb.q, zb.p - m * x.df - m * x.dgamma / x.gamma * (zb.q - x.f)};
}
PhasePoint to_tilde(PhasePoint z, const ScheduleSample& x) { return {(z.q - x.f) / x.gamma, x.gamma * z.p}; }
PhasePoint from_tilde(PhasePoint zt, const ScheduleSample& x) { return {x.gamma * zt.q + x.f, zt.p / x.gamma}; }
PhasePoint local_to_tilde(PhasePoint zb, const ScheduleSample& x, double m) {
  return {(zb.q - x.f) / x.gamma, x.gamma * (zb.p - m * x.df) - m * x.dgamma * (zb.q - x.f)};
}
PhasePoint tilde_to_local(PhasePoint zt, const ScheduleSample& x, double m) {
  return {x.gamma * zt.q + x.f, zt.p / x.gamma + m * x.dgamma * zt.q + m * x.df};
}

PhasePoint to_local(PhasePoint z, const DriveSchedule& s, double t, double m) { return to_local(z, s.local(t), m); }
PhasePoint to_tilde(PhasePoint z, const DriveSchedule& s, double t) { return to_tilde(z, s.local(t)); }
PhasePoint local_to_tilde(PhasePoint zb, const DriveSchedule& s, double t, double m) {
  return local_to_tilde(zb, s.local(t), m);
}

PhasePoint convert_frame(PhasePoint z, Frame from, Frame to, const ScheduleSample& x, double m) {
  // Canonical (cd) coordinates as the pivot; bare shares them.
  PhasePoint c = z;
  if (from == Frame::local_Hbar) c = from_local(z, x, m);
  if (from == Frame::tilde_Htilde) c = from_tilde(z, x);
  if (to == Frame::local_Hbar) return to_local(c, x, m);
  if (to == Frame::tilde_Htilde) return to_tilde(c, x);
  return c;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

using State = std::array<double, 2>;

struct Rhs {
  Frame frame;
  const DrivenPotential* dp;

  void operator()(const State& s, State& ds, double t) const {
    const PotentialSpec& spec = dp->spec;
    const double m = spec.mass;
    if (frame == Frame::tilde_Htilde) {
      ds[0] = s[1] / m;
      ds[1] = -eval_dU0(spec, s[0]);
      return;
    }
    const ScheduleSample x = dp->schedule.local(t);
    const double g = x.gamma;
    switch (frame) {
      case Frame::bare_H0:
        ds[0] = s[1] / m;
        ds[1] = -eval_dU0(spec, (s[0] - x.f) / g) / (g * g * g);
        break;
      case Frame::cd_H: {
        const double r = x.dgamma / g;
        ds[0] = s[1] / m + r * (s[0] - x.f) + x.df;
        ds[1] = -eval_dU0(spec, (s[0] - x.f) / g) / (g * g * g) - r * s[1];
        break;
      }
      case Frame::local_Hbar:
        ds[0] = s[1] / m;
        ds[1] = -local_cd_dU(spec, x, s[0]);
        break;
      default: break;
    }
  }
};

double safe_omega(const PotentialSpec& spec, double Es, double x_inside, LoopConvention c) {
  try {
    return phase_space_volume(spec, Es, 1.0, 0.0, c, x_inside);
  } catch (const NoTurningPoint&) {
    return std::numeric_limits<double>::quiet_NaN();
  } catch (const std::out_of_range&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

TrajectorySample make_sample(Frame frame, const DrivenPotential& dp, double t, double tau, const State& s,
                             const IntegratorConfig& cfg) {
  const ScheduleSample x = dp.schedule.local(t);
  TrajectorySample out;
  out.t = x.t;
  out.tau = tau;
  out.z = {s[0], s[1]};
  out.H = hamiltonian_value(frame, dp.spec, x, out.z);
  out.I = invariant_from_sample(frame, dp.spec, x, out.z);
  if (cfg.track_omega) {
    const double m = dp.spec.mass;
    if (frame == Frame::tilde_Htilde) {
      out.omega = safe_omega(dp.spec, out.I, s[0], cfg.convention);
    } else {
      // Bare shell through the sample's own coordinates.
      const double xq = (s[0] - x.f) / x.gamma;
      const double Es = x.gamma * x.gamma * s[1] * s[1] / (2.0 * m) + eval_U0(dp.spec, xq);
      out.omega = safe_omega(dp.spec, Es, xq, cfg.convention);
    }
  }
  return out;
}

}  // namespace

Trajectory integrate(Frame frame, const DrivenPotential& dp, PhasePoint z0, double t0, double t1,
                     const IntegratorConfig& cfg) {
  if (is_box(dp.spec)) throw std::invalid_argument("box potentials run through box_simulate");
  if (!(std::isfinite(z0.q) && std::isfinite(z0.p))) throw std::invalid_argument("initial point must be finite");
  if (!(t1 > t0)) throw std::invalid_argument("integration needs t1 > t0");
  if (cfg.samples < 2) throw std::invalid_argument("need at least 2 samples");
  if (!(cfg.step > 0.0) || !(cfg.tolerance > 0.0)) throw std::invalid_argument("step and tolerance must be positive");

  std::vector<double> times(cfg.samples);
  for (std::size_t i = 0; i < cfg.samples; ++i)
    times[i] = i + 1 == cfg.samples ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(cfg.samples - 1);
  // Range check up front so failures are argument errors, not integration failures.
  dp.schedule.local(t0);
  dp.schedule.local(t1);

  std::vector<double> clock = times;
  if (frame == Frame::tilde_Htilde) clock = tau_on_grid(dp.schedule, times);
  const std::vector<double> taus = frame == Frame::tilde_Htilde ? clock : tau_on_grid(dp.schedule, times);

  Trajectory traj;
  traj.frame = frame;
  traj.samples.reserve(cfg.samples);
  State s{z0.q, z0.p};
  const Rhs rhs{frame, &dp};
  traj.samples.push_back(make_sample(frame, dp, times[0], taus[0], s, cfg));

  auto controlled = odeint::make_controlled(cfg.tolerance, cfg.tolerance, odeint::runge_kutta_dopri5<State>());
  odeint::runge_kutta4<State> rk4;
  double dt = cfg.step;
  for (std::size_t i = 1; i < cfg.samples; ++i) {
    const double a = clock[i - 1], b = clock[i];
    try {
      if (cfg.method == Method::rk45_adaptive) {
        odeint::integrate_adaptive(controlled, rhs, s, a, b, std::min(dt, b - a));
      } else {
        const auto n = static_cast<std::size_t>(std::ceil((b - a) / cfg.step));
        const double h = (b - a) / static_cast<double>(n);
        double t = a;
        for (std::size_t k = 0; k < n; ++k, t = a + h * static_cast<double>(k)) rk4.do_step(rhs, s, t, h);
      }
    } catch (const std::exception& e) {
      traj.complete = false;
      traj.failure = std::string("integration failed: ") + e.what();
      return traj;
    }
    if (!std::isfinite(s[0]) || !std::isfinite(s[1])) {
      traj.complete = false;
      traj.failure = "integration failed: state diverged near t = " + std::to_string(times[i]);
      return traj;
    }
    traj.samples.push_back(make_sample(frame, dp, times[i], taus[i], s, cfg));
  }
  return traj;
}

std::pair<Trajectory, Trajectory> reconstruct_from_tilde(const Trajectory& tilde, const DrivenPotential& dp) {
  if (tilde.frame != Frame::tilde_Htilde) throw std::invalid_argument("reconstruction needs a tilde-frame trajectory");
  if (tilde.samples.size() < 2) throw std::invalid_argument("trajectory has fewer than 2 samples");
  for (std::size_t i = 1; i < tilde.samples.size(); ++i)
    if (!(tilde.samples[i].tau >= tilde.samples[i - 1].tau) || !(tilde.samples[i].t > tilde.samples[i - 1].t))
      throw std::invalid_argument("tilde trajectory lacks a monotone t <-> tau map");
  Trajectory cd, local;
  cd.frame = Frame::cd_H;
  local.frame = Frame::local_Hbar;
  const double m = dp.spec.mass;
  for (const auto& smp : tilde.samples) {
    const ScheduleSample x = dp.schedule.local(smp.t);
    TrajectorySample a = smp, b = smp;
    a.z = from_tilde(smp.z, x);
    b.z = tilde_to_local(smp.z, x, m);
    a.H = hamiltonian_value(Frame::cd_H, dp.spec, x, a.z);
    b.H = hamiltonian_value(Frame::local_Hbar, dp.spec, x, b.z);
    a.I = invariant_from_sample(Frame::cd_H, dp.spec, x, a.z);
    b.I = invariant_from_sample(Frame::local_Hbar, dp.spec, x, b.z);
    cd.samples.push_back(a);
    local.samples.push_back(b);
  }
  return {cd, local};
}

double generator_step_defect(const PotentialSpec& spec, PhasePoint z, double gamma, double f, double dgamma) {
  // dz = (d xi/dp, -d xi/dq) dgamma with xi = (q - f) p / gamma
  const PhasePoint z2{z.q + (z.q - f) / gamma * dgamma, z.p - z.p / gamma * dgamma};
  auto omega = [&](PhasePoint w, double g) {
    const double xq = (w.q - f) / g;
    const double Es = g * g * w.p * w.p / (2.0 * spec.mass) + eval_U0(spec, xq);
    return phase_space_volume(spec, Es, 1.0, 0.0, LoopConvention::full_loop, xq);
  };
  return omega(z2, gamma + dgamma) - omega(z, gamma);
}

// ---------------------------------------------------------------------------
// Box

double BoxProtocol::width(double t) const {
  if (t <= t0) return L0;
  if (t >= t1) return L1;
  return L0 + rate() * (t - t0);
}

double BoxProtocol::speed(double t) const { return (t > t0 && t < t1) ? rate() : 0.0; }

namespace {

struct BoxState {
  double t, q, p;
};

// Width on the current phase as an affine function of time.
struct Phase {
  double t_begin, La, u;
  double L(double t) const { return La + u * (t - t_begin); }
};

BoxState advance(const BoxState& s, double t_new, const Phase& ph, Frame frame, double m) {
  BoxState out{t_new, s.q, s.p};
  if (frame == Frame::cd_H) {
    // L p is conserved and d(q/L)/dt = (L p) / (m L^2).
    const double La = ph.L(s.t), Lb = ph.L(t_new);
    const double C = La * s.p;
    const double y = s.q / La + C / m * (t_new - s.t) / (La * Lb);
    out.q = y * Lb;
    out.p = C / Lb;
  } else {
    out.q = s.q + s.p / m * (t_new - s.t);
  }
  return out;
}

// Time to the next wall contact inside the phase, or +inf.
double next_hit(const BoxState& s, const Phase& ph, Frame frame, double m, BoxEventKind& kind) {
  const double La = ph.L(s.t);
  const double inf = std::numeric_limits<double>::infinity();
  if (frame == Frame::cd_H) {
    const double C = La * s.p;
    if (C == 0.0) return inf;
    const double y = s.q / La;
    const double dy = (C > 0.0 ? 1.0 : 0.0) - y;
    kind = C > 0.0 ? BoxEventKind::right_wall : BoxEventKind::left_wall;
    // Solve C s = m dy La (La + u s) for the elapsed time s.
    const double denom = C - m * dy * La * ph.u;
    if (dy == 0.0 || !(denom * C > 0.0)) return inf;
    const double dt = m * dy * La * La / denom;
    return dt > 0.0 ? s.t + dt : inf;
  }
  const double v = s.p / m;
  double best = inf;
  if (v > ph.u) {
    const double dt = (La - s.q) / (v - ph.u);
    if (dt > 0.0) best = s.t + dt, kind = BoxEventKind::right_wall;
  }
  if (v < 0.0) {
    const double dt = -s.q / v;
    if (dt > 0.0 && s.t + dt < best) best = s.t + dt, kind = BoxEventKind::left_wall;
  }
  return best;
}

TrajectorySample box_sample(const BoxProtocol& box, const BoxState& s, Frame frame, double m) {
  TrajectorySample out;
  out.t = s.t;
  out.z = {s.q, s.p};
  const double L = box.width(s.t);
  const double u = box.speed(s.t);
  const double g = L / box.L0;
  const double kin = s.p * s.p / (2.0 * m);
  out.omega = 2.0 * L * std::abs(s.p);
  switch (frame) {
    case Frame::cd_H:
      out.H = kin + u / L * s.q * s.p;
      out.I = g * g * kin;
      break;
    case Frame::local_Hbar: {
      out.H = kin;
      const double k = s.p - m * u / L * s.q;
      out.I = g * g * k * k / (2.0 * m);
      break;
    }
    default:
      out.H = kin;
      out.I = g * g * kin;
  }
  return out;
}

}  // namespace

BoxRun box_simulate(const BoxProtocol& box, PhasePoint z0, Frame frame, double t_start, double t_end, double mass,
                    std::size_t samples) {
  if (!(box.L0 > 0.0 && box.L1 > 0.0 && box.t1 > box.t0))
    throw std::invalid_argument("box protocol needs positive widths and t1 > t0");
  if (frame == Frame::tilde_Htilde) throw std::invalid_argument("box demo runs in the cd, local or bare frame");
  if (!(t_end > t_start) || samples < 2) throw std::invalid_argument("bad sampling window");
  const double Lstart = box.width(t_start);
  if (!(z0.q > 0.0 && z0.q < Lstart))
    throw std::invalid_argument("initial point outside the box (0, " + std::to_string(Lstart) + ")");

  BoxRun run;
  run.trajectory.frame = frame;
  const double m = mass;
  const double u = box.rate();
  BoxState s{t_start, z0.q, z0.p};

  std::vector<double> out_times(samples);
  for (std::size_t i = 0; i < samples; ++i)
    out_times[i] = i + 1 == samples ? t_end
                                    : t_start + (t_end - t_start) * static_cast<double>(i) / static_cast<double>(samples - 1);
  std::size_t next_out = 0;

  auto phase_at = [&](double t) {
    if (t < box.t0) return Phase{t, box.L0, 0.0};
    if (t < box.t1) return Phase{box.t0, box.L0, u};
    return Phase{t, box.L1, 0.0};
  };
  auto phase_end = [&](double t) {
    if (t < box.t0) return box.t0;
    if (t < box.t1) return box.t1;
    return std::numeric_limits<double>::infinity();
  };
  auto impulse = [&](double t) {
    if (frame != Frame::local_Hbar) return;
    const bool on = t == box.t0;
    const double dp = on ? m * s.q * u / box.L0 : -m * s.q * u / box.L1;
    run.events.push_back({t, on ? BoxEventKind::impulse_on : BoxEventKind::impulse_off, s.q, s.p, s.p + dp});
    s.p += dp;
  };

  if (t_start == box.t0) impulse(box.t0);
  while (true) {
    const Phase ph = phase_at(s.t);
    const double boundary = std::min(phase_end(s.t), t_end);
    BoxEventKind kind = BoxEventKind::left_wall;
    const double hit = next_hit(s, ph, frame, m, kind);
    const double t_next = std::min(hit, boundary);
    while (next_out < samples && out_times[next_out] <= t_next) {
      run.trajectory.samples.push_back(box_sample(box, advance(s, out_times[next_out], ph, frame, m), frame, m));
      ++next_out;
    }
    if (t_next >= t_end && hit >= t_end) break;
    s = advance(s, t_next, ph, frame, m);
    if (hit <= boundary) {
      const double before = s.p;
      const double L = ph.L(t_next);
      if (kind == BoxEventKind::right_wall) {
        s.q = L;
        s.p = frame == Frame::cd_H ? -s.p : -s.p + 2.0 * m * ph.u;
      } else {
        s.q = 0.0;
        s.p = -s.p;
      }
      run.events.push_back({t_next, kind, s.q, before, s.p});
    } else if (t_next == box.t0 || t_next == box.t1) {
      impulse(t_next);
    }
    if (t_next >= t_end) break;
  }
  // The last output time coincides with t_end, already emitted above unless the loop broke on a hit.
  while (next_out < samples) {
    run.trajectory.samples.push_back(box_sample(box, advance(s, out_times[next_out], phase_at(s.t), frame, m), frame, m));
    ++next_out;
  }
  return run;
}

}  // namespace sta
