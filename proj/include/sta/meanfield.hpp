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

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sta/potentials.hpp"
#include "sta/quantum.hpp"
#include "sta/schedules.hpp"

// Mean-field shortcuts in one dimension. Wave functions are normalized to one;
// the interaction strength carries the particle number.

namespace sta {

enum class NonlinearKind { gpe, kolomeisky };

std::string_view to_string(NonlinearKind k);
NonlinearKind nonlinear_kind_from_string(std::string_view name);

/// gpe: N(psi) = g |psi|^2 with g(0) = g0.
/// kolomeisky: N(psi) = (pi^2 hbar^2 / 2m) particles^2 |psi|^4 (the quintic term of a Tonks gas of
/// `particles` atoms written for a unit-norm psi).
struct NonlinearModel {
  NonlinearKind kind = NonlinearKind::gpe;
  double g0 = 0.0;
  double particles = 1.0;

  static NonlinearModel gpe(double g0);
  static NonlinearModel kolomeisky(double particles = 1.0);
  /// Throws std::invalid_argument for g0 < 0 or particles <= 0.
  void validate() const;
};

/// Coefficient c of the nonlinear potential c |psi|^{2p}: g for gpe (p = 1), the quintic prefactor for
/// kolomeisky (p = 2).
double nonlinear_coefficient(const NonlinearModel& m, double mass, double hbar = 1.0);

/// Coupling at one time: g0/gamma for gpe, the constant quintic prefactor for kolomeisky.
double coupling_at(const NonlinearModel& m, const DriveSchedule& s, double t, double mass, double hbar = 1.0);
/// Ratio coupling(t)/coupling(0) on `samples` uniform times over [0, tau_F].
std::vector<std::pair<double, double>> coupling_schedule(const NonlinearModel& m, const DriveSchedule& s,
                                                         std::size_t samples = 201);

struct StationaryState {
  WaveFunction psi;
  double mu = 0.0;
};

struct GroundStateOptions {
  double dtau = 1e-2;              // coarse imaginary-time step; two refinements follow
  std::size_t max_iterations = 400000;
  double mu_tolerance = 1e-10;     // relative change between successive estimates
  double hbar = 1.0;
};

/// Imaginary-time split-step with renormalization after every step. The fixed points at dtau/5 and
/// dtau/10 are Richardson-combined to cancel the O(dtau^2) splitting bias. Throws ConvergenceError.
StationaryState ground_state(const NonlinearModel& model, const PotentialSpec& spec, const SpatialGrid& grid,
                             const GroundStateOptions& opt = {});

/// Nonlinear potential N(psi) on the grid for coefficient c.
std::vector<double> nonlinear_potential(const NonlinearModel& m, double c, const WaveFunction& psi);
/// Energy functional E[psi] and chemical potential mu[psi] for trap values V.
double energy_functional(const NonlinearModel& m, double c, const WaveFunction& psi, std::span<const double> V);
double chemical_potential(const NonlinearModel& m, double c, const WaveFunction& psi, std::span<const double> V);
/// || [T + V + N(psi)] psi - mu psi ||_2.
double stationary_residual(const NonlinearModel& m, const StationaryState& st, const PotentialSpec& spec);
/// 2<T> - <q U0'(q)> + p E_int over mu, with p = 1 (gpe) or 2 (kolomeisky); zero at a stationary state.
double virial_residual(const NonlinearModel& m, const StationaryState& st, const PotentialSpec& spec);

/// Thomas-Fermi density max(mu_TF - U0(q), 0)/g normalized to one, with mu_TF from bisection.
std::vector<double> thomas_fermi_density(const PotentialSpec& spec, double g, const SpatialGrid& grid);
/// Relative L2 distance || a - b || / || b ||.
double relative_l2(std::span<const double> a, std::span<const double> b);

// -- driven runs ------------------------------------------------------------------

struct MeanFieldRunConfig {
  std::size_t grid_points = 1024;
  std::optional<std::pair<double, double>> extent;  // automatic when empty
  double dt = 1e-3;
  bool freeze_coupling = false;  // control: g stays at g0
  std::size_t samples = 201;
  std::size_t snapshots = 5;
  GroundStateOptions ground;
};

struct MeanFieldSample {
  double t = 0.0;
  double R = 0.0;  // relative L2 distance of |psi|^2 from the scaled initial density
  double F = 0.0;  // fidelity against U . (scaled state with phase e^{-i mu tau})
  double norm = 0.0;
  double g = 0.0;  // coupling coefficient in use
  double energy = 0.0;  // energy functional with the instantaneous CD trap
};

struct MeanFieldReport {
  SpatialGrid grid{256, -1.0, 1.0};
  double mu = 0.0;
  std::vector<MeanFieldSample> samples;
  std::vector<DensitySnapshot> snapshots;
  double max_R = 0.0;
  double min_F = 1.0;
  double F_end = 0.0;  // against the target with the mu tau phase, no U
  double max_norm_error = 0.0;
};

/// Grid that holds the ground state for every (gamma(t), f(t)) of the schedule.
SpatialGrid meanfield_grid(const NonlinearModel& model, const PotentialSpec& spec, const DriveSchedule& s,
                           std::size_t points, const GroundStateOptions& opt = {});

/// Propagates `state` under the local CD potential plus the nonlinear term with the scheduled coupling.
MeanFieldReport cd_propagate(const StationaryState& state, const NonlinearModel& model, const DrivenPotential& dp,
                             const MeanFieldRunConfig& cfg = {});
/// Ground state on an automatic (or configured) grid, then cd_propagate.
MeanFieldReport meanfield_run(const NonlinearModel& model, const DrivenPotential& dp,
                              const MeanFieldRunConfig& cfg = {});

}  // namespace sta
