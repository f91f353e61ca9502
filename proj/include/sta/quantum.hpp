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

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sta/potentials.hpp"
#include "sta/schedules.hpp"

namespace sta {

using cplx = std::complex<double>;

enum class Boundary { periodic, dirichlet };

/// Uniform grid. Periodic: q_k = q_min + k dq with dq = (q_max - q_min)/n.
/// Dirichlet: interior points q_k = q_min + (k + 1) dq with dq = (q_max - q_min)/(n + 1); the walls sit at
/// q_min and q_max.
class SpatialGrid {
 public:
  SpatialGrid(std::size_t n, double q_min, double q_max, Boundary boundary = Boundary::periodic);

  std::size_t size() const { return n_; }
  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }
  double length() const { return q_max_ - q_min_; }
  double dq() const { return dq_; }
  Boundary boundary() const { return boundary_; }
  double q(std::size_t k) const;
  std::vector<double> points() const;
  /// Eigenvalues hbar^2 k^2 / 2m of the kinetic operator in transform order (FFT order or sine index).
  std::vector<double> kinetic_spectrum(double mass, double hbar = 1.0) const;

  bool operator==(const SpatialGrid& o) const;

 private:
  std::size_t n_;
  double q_min_, q_max_, dq_;
  Boundary boundary_;
};

struct WaveFunction {
  SpatialGrid grid;
  std::vector<cplx> psi;
  double hbar = 1.0;
  double mass = 1.0;

  WaveFunction(SpatialGrid g, double mass_ = 1.0, double hbar_ = 1.0);

  double norm() const;  // int |psi|^2 dq
  void normalize();
  std::vector<double> density() const;
};

struct EigenPair {
  int n = 0;
  double energy = 0.0;
  WaveFunction state;
};

/// spectral: Fourier-grid (periodic) or sine-grid (Dirichlet) kinetic matrix, dense eigensolve; its kinetic
/// operator is exactly the one used by split_step_propagate. finite_difference: second-order
/// three-point Laplacian, tridiagonal eigensolve.
enum class EigenMethod { spectral, finite_difference };

/// Lowest n_max + 1 eigenpairs of p^2/2m + U0 on the grid, ascending, real and L2-normalized.
/// Throws ResolutionError when a state has fewer than 16 points per local wavelength, ExtentError when the
/// highest state is not negligible (1e-8 of its maximum) at the grid edges of a periodic grid.
std::vector<EigenPair> solve_eigenstates(const PotentialSpec& spec, const SpatialGrid& grid, int n_max,
                                         EigenMethod method = EigenMethod::spectral, double hbar = 1.0);

/// Potential values on the grid points.
std::vector<double> sample_on_grid(const SpatialGrid& grid, const std::function<double(double)>& U);

/// (H psi)(q) with the spectral kinetic operator and potential values V on the grid.
std::vector<cplx> apply_hamiltonian(const WaveFunction& psi, std::span<const double> V);
double energy_expectation(const WaveFunction& psi, std::span<const double> V);
/// || H psi - E psi ||_2 for potential values V.
double eigen_residual(const WaveFunction& psi, std::span<const double> V, double E);

/// gamma^{-1/2} psi0((q - f)/gamma) by natural cubic interpolation onto `target` (default: psi0's grid),
/// renormalized. Throws ExtentError when the support of the scaled state leaves the grid.
WaveFunction scaled_eigenstate(const EigenPair& psi0, double gamma, double f,
                               std::optional<SpatialGrid> target = std::nullopt);

/// The adiabatic state gamma^{-1/2} exp(-i E_n tau(t)/hbar) psi0((q - f)/gamma).
WaveFunction target_state(const EigenPair& psi0, const DriveSchedule& s, double t,
                          std::optional<SpatialGrid> target = std::nullopt);

/// Multiply by exp{(i m/hbar)[fdot q + (gdot/2g)(q - f)^2] - (i m/2hbar) int_0^t fdot^2}. `inverse`
/// applies the conjugate phase.
WaveFunction cd_unitary_apply(WaveFunction psi, const DriveSchedule& s, double t, bool inverse = false);

std::complex<double> overlap(const WaveFunction& a, const WaveFunction& b);  // <a|b>
/// |<a|b>|^2 for normalized inputs. Throws GridMismatch.
double fidelity(const WaveFunction& a, const WaveFunction& b);

// -- propagation -----------------------------------------------------------------

/// Fills V with the potential at time t on the grid points q.
using GridPotential = std::function<void(double t, std::span<const double> q, std::span<double> V)>;
using PointPotential = std::function<double(double q, double t)>;

struct PropagationOptions {
  /// Called at t0 and then every `observe_every` steps and at t1.
  std::function<void(double t, const WaveFunction& psi)> observer;
  std::size_t observe_every = 1;
  bool check_leakage = true;      // periodic grids only
  double leakage_threshold = 1e-6;  // edge amplitude relative to the maximum
  bool check_timestep = true;     // dt E_max / hbar < 0.1 for the populated band at t0
};

/// Strang split-step from t0 to t1: half potential, full kinetic (FFT or sine transform), half potential.
/// The step is shrunk so that an integer number of steps lands on t1.
WaveFunction split_step_propagate(WaveFunction psi, const GridPotential& U, double t0, double t1, double dt,
                                  const PropagationOptions& opt = {});
WaveFunction split_step_propagate(WaveFunction psi, const PointPotential& U, double t0, double t1, double dt,
                                  const PropagationOptions& opt = {});

/// Reusable kinetic and potential sub-steps on one grid (FFTW plans are built once).
class SplitStepper {
 public:
  SplitStepper(const SpatialGrid& grid, double mass, double hbar = 1.0);
  ~SplitStepper();
  SplitStepper(const SplitStepper&) = delete;
  SplitStepper& operator=(const SplitStepper&) = delete;

  void kinetic(std::vector<cplx>& psi, double dt);
  void potential(std::vector<cplx>& psi, std::span<const double> V, double dt);
  /// Imaginary-time factors exp(-T dtau / hbar) and exp(-V dtau / hbar).
  void kinetic_decay(std::vector<cplx>& psi, double dtau);
  void potential_decay(std::vector<cplx>& psi, std::span<const double> V, double dtau);
  /// psi <- T psi
  void apply_kinetic(std::vector<cplx>& psi);
  /// Kinetic energy <psi|T|psi> for a wave function on this grid (dq-weighted).
  double kinetic_energy(const std::vector<cplx>& psi);
  /// Largest kinetic eigenvalue among modes holding more than `rel` of the peak spectral weight.
  double populated_kinetic_max(const std::vector<cplx>& psi, double rel = 1e-8);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// -- shortcut protocol ------------------------------------------------------------

struct QuantumRunConfig {
  std::size_t grid_points = 1024;
  std::optional<std::pair<double, double>> extent;  // automatic when empty
  double dt = 1e-3;
  bool control = true;
  std::size_t samples = 201;
  std::size_t snapshots = 5;  // density snapshots kept for plotting
  EigenMethod method = EigenMethod::spectral;
};

struct InvariantSample {
  double t = 0.0;
  double F_vs_Utarget = 0.0;
  double F_vs_target = 0.0;
  double norm = 0.0;
  double energy = 0.0;
};

struct DensitySnapshot {
  double t = 0.0;
  std::vector<double> rho;
};

struct InvariantReport {
  SpatialGrid grid{256, -1.0, 1.0};
  double E_n = 0.0;
  std::vector<InvariantSample> cd;
  std::vector<InvariantSample> control;  // empty when the control run is off
  std::vector<DensitySnapshot> snapshots;
  double F_end = 0.0;
  double F_control_end = 0.0;
  double min_F_vs_Utarget = 1.0;
  double max_norm_error = 0.0;
};

/// Grid that holds eigenstate n of spec for every (gamma(t), f(t)) of the schedule.
SpatialGrid auto_grid(const PotentialSpec& spec, const DriveSchedule& s, int n, std::size_t points);

/// Propagates eigenstate n under the local CD potential and, optionally, under the bare driven potential.
InvariantReport shortcut_run(const PotentialSpec& spec, const DriveSchedule& s, int n,
                             const QuantumRunConfig& cfg = {});

}  // namespace sta
