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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sta/potentials.hpp"

namespace sta {

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

/// bare_H0: p^2/2m + U(q,t).  cd_H: adds (gammadot/gamma)(q-f)p + fdot p.
/// local_Hbar: p^2/2m + local CD potential.  tilde_Htilde: autonomous after t -> tau.
enum class Frame { bare_H0, cd_H, local_Hbar, tilde_Htilde };

std::string_view to_string(Frame f);
Frame frame_from_string(std::string_view name);

enum class LoopConvention { full_loop, half_loop };

struct TrajectorySample {
  double t = 0.0;
  double tau = 0.0;
  PhasePoint z;
  double H = 0.0;      // Hamiltonian of the frame
  double omega = 0.0;  // adiabatic invariant of the bare shell through z (NaN when unbound)
  double I = 0.0;      // dynamical invariant in the frame's coordinates
};

struct Trajectory {
  Frame frame = Frame::cd_H;
  std::vector<TrajectorySample> samples;
  bool complete = true;
  std::string failure;  // set when integration stopped early
};

enum class Method { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  double step = 1e-3;      // rk4 step, initial step for rk45
  double tolerance = 1e-12;
  double event_tolerance = 1e-12;
  std::size_t samples = 201;
  bool track_omega = true;
  LoopConvention convention = LoopConvention::full_loop;
};

// -- phase-space volume ------------------------------------------------------

struct TurningPoints {
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Location of the bottom of U0.
double potential_argmin(const PotentialSpec& spec);

/// Turning points of the base shell U0(x) = E that enclose `x_inside` (default: the minimum).
/// Throws NoTurningPoint when the motion is unbounded on either side.
TurningPoints shell_turning_points(const PotentialSpec& spec, double E,
                                   std::optional<double> x_inside = std::nullopt);

/// Omega(E; gamma, f) = Omega(gamma^2 E; 1, 0), the area of the shell H0 = E.
/// Full loop is 2 int_{q1}^{q2} sqrt(2m(E - U)) dq, half loop drops the factor 2.
double phase_space_volume(const PotentialSpec& spec, double E, double gamma = 1.0, double f = 0.0,
                          LoopConvention convention = LoopConvention::full_loop,
                          std::optional<double> x_inside = std::nullopt);

/// Orbit period at energy E for gamma = 1, f = 0 (dOmega/dE in the full-loop convention).
double orbit_period(const PotentialSpec& spec, double E,
                    std::optional<double> x_inside = std::nullopt);

/// omega(z, lambda(t)) for the driven potential, using the scaling shortcut.
double adiabatic_invariant(const DrivenPotential& dp, PhasePoint z, double t,
                           LoopConvention convention = LoopConvention::full_loop);

// -- Hamiltonians and invariants ----------------------------------------------

double hamiltonian_value(Frame frame, const DrivenPotential& dp, PhasePoint z, double t);
/// Hamiltonian of a given frame from an evaluated schedule sample.
double hamiltonian_value(Frame frame, const PotentialSpec& spec, const ScheduleSample& x, PhasePoint z);

/// Energy-like dynamical invariant I in the frame's own coordinates.
double invariant_I(Frame frame, const DrivenPotential& dp, PhasePoint z, double t);

// -- canonical maps ------------------------------------------------------------

PhasePoint to_local(PhasePoint z, const ScheduleSample& x, double mass);
PhasePoint from_local(PhasePoint zbar, const ScheduleSample& x, double mass);
PhasePoint to_tilde(PhasePoint z, const ScheduleSample& x);
PhasePoint from_tilde(PhasePoint zt, const ScheduleSample& x);
PhasePoint local_to_tilde(PhasePoint zbar, const ScheduleSample& x, double mass);
PhasePoint tilde_to_local(PhasePoint zt, const ScheduleSample& x, double mass);

PhasePoint to_local(PhasePoint z, const DriveSchedule& s, double t, double mass = 1.0);
PhasePoint to_tilde(PhasePoint z, const DriveSchedule& s, double t);
PhasePoint local_to_tilde(PhasePoint zbar, const DriveSchedule& s, double t, double mass = 1.0);

/// Express a phase point of one frame in another (all frames share the physical state).
PhasePoint convert_frame(PhasePoint z, Frame from, Frame to, const ScheduleSample& x, double mass);

// -- integration ---------------------------------------------------------------

/// Integrate Hamilton's equations of `frame` from z0 at t0 to t1, sampling uniformly in t.
/// The tilde frame integrates in tau and stores the t <-> tau map on every sample.
Trajectory integrate(Frame frame, const DrivenPotential& dp, PhasePoint z0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

/// Map a tilde-frame trajectory back to the cd_H and local_Hbar frames.
std::pair<Trajectory, Trajectory> reconstruct_from_tilde(const Trajectory& tilde,
                                                         const DrivenPotential& dp);

/// omega(z + dz, lambda + dlambda) - omega(z, lambda) for a dilation step dgamma with dz generated by
/// xi = (q - f) p / gamma. Second order in dgamma when the generator condition holds.
double generator_step_defect(const PotentialSpec& spec, PhasePoint z, double gamma, double f,
                             double dgamma);

// -- time-dependent box ----------------------------------------------------------

/// Width L0 until t0, then linear at rate u = (L1 - L0)/(t1 - t0), then L1. Walls at 0 and L(t).
struct BoxProtocol {
  double L0 = 1.0;
  double L1 = 2.0;
  double t0 = 0.0;
  double t1 = 1.0;

  double rate() const { return (L1 - L0) / (t1 - t0); }
  double width(double t) const;
  double speed(double t) const;  // dL/dt
};

enum class BoxEventKind { left_wall, right_wall, impulse_on, impulse_off };

struct BoxEvent {
  double t = 0.0;
  BoxEventKind kind = BoxEventKind::left_wall;
  double q = 0.0;
  double p_before = 0.0;
  double p_after = 0.0;
};

struct BoxRun {
  Trajectory trajectory;
  std::vector<BoxEvent> events;
};

/// Event-driven motion in the box. cd_H uses the dilation Hamiltonian p^2/2m + (u/L) q p with
/// p -> -p at both walls; local_Hbar and bare_H0 move freely with the moving-mirror law
/// p -> -p + 2 m u at q = L; local_Hbar additionally receives the impulses m q u / L0 at t0 and
/// -m q u / L1 at t1. Samples are uniform in [t_start, t_end].
BoxRun box_simulate(const BoxProtocol& box, PhasePoint z0, Frame frame, double t_start, double t_end,
                    double mass = 1.0, std::size_t samples = 401);

}  // namespace sta
