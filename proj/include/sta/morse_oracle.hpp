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

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sta/classical.hpp"
#include "sta/potentials.hpp"

// Closed-form oracles for the driven Morse oscillator
//
//   H0 = p^2/2m + D (e^{-2 b q} - 2 e^{-b q}),   m = 1/2,
//
// in three drives that vary one parameter each. Units are fixed inside this
// header: D = b = 1 unless the mode varies that parameter, and the scale mode
// uses D = 1/gamma^2, b = 1/gamma.

namespace sta::morse {

inline constexpr double kMass = 0.5;

enum class Mode { scale, width, depth };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view name);

struct MorseDrive {
  Mode mode = Mode::scale;
  double value = 1.0;  // gamma, beta or Um
  double rate = 0.0;   // d(value)/dt, enters only through H1 = rate * xi

  MorseDrive() = default;
  MorseDrive(Mode m, double v, double r = 0.0);

  double depth() const;  // D
  double beta() const;   // b
  double well_bottom() const { return -depth(); }
};

/// The same potential as a generic spec (mass 1/2).
PotentialSpec to_spec(const MorseDrive& d);

double potential(const MorseDrive& d, double q);
double force_gradient(const MorseDrive& d, double q);  // dU/dq
double hamiltonian(const MorseDrive& d, PhasePoint z);
/// d H0 / d(value) at fixed (q, p).
double parameter_derivative(const MorseDrive& d, double q);

// -- volumes and turning points -----------------------------------------------

/// Full-loop area of the shell H0 = E. Scale: 2 pi (1 - sqrt(-E gamma^2)); width: (2 pi/b)(1 - sqrt(-E));
/// depth: 2 pi (sqrt(Um) - sqrt(-E)). Throws std::out_of_range outside [bottom, 0).
double omega_closed_form(const MorseDrive& d, double E);
/// Width mode as commonly quoted, 2 pi (1/b^2 - sqrt(-E)/b). Differs from the quadrature when b != 1.
double omega_width_quoted(double beta, double E);
/// Full-loop area by quadrature of sqrt(2m(E - U)) between numerically located turning points.
double omega_quadrature(const MorseDrive& d, double E);

struct MorseTurningPoints {
  double q1 = 0.0;
  double q2 = 0.0;
  bool unbounded = false;  // E = 0: q2 is +inf
};

/// q1 = -log(1 + sqrt(1 + E/D))/b, q2 = -log(1 - sqrt(1 + E/D))/b. E = 0 is accepted and flagged.
MorseTurningPoints turning_points(const MorseDrive& d, double E);

/// Phase point on the shell H0 = E at angle theta in [-pi, pi): theta = -pi/2 and pi/2 are the
/// turning points, p >= 0 for |theta| <= pi/2.
PhasePoint shell_point(const MorseDrive& d, double E, double theta);

// -- generators and averages ------------------------------------------------------

/// xi with d xi/dt along the H0 flow equal to dH0/d(value) - <dH0/d(value)>.
/// Scale: q p / gamma. Width and depth use a two-argument angle and need H0(z) <= 0 (else OutOfDomain).
double xi_closed_form(const MorseDrive& d, PhasePoint z);

/// <dH0/d(value)> on the shell E from -dOmega/d(value) / dOmega/dE.
double mean_force_closed_form(const MorseDrive& d, double E);

/// Time average of obs over one closed orbit at energy E.
double microcanonical_average(const std::function<double(PhasePoint)>& obs, const MorseDrive& d, double E);

/// Orbit period by quadrature.
double orbit_period(const MorseDrive& d, double E);

struct PdeConfig {
  std::size_t samples = 400;  // points along one period
  double fd_step = 2.5e-4;   // flow-time step of the derivative stencil
  double bracket_step = 1e-5;  // phase-space step for the Poisson bracket partials
  double tolerance = 1e-13;
};

struct PdeResidual {
  double rms_flow = 0.0;     // d xi/dt by finite differences along the flow
  double rms_bracket = 0.0;  // {xi, H0} from partial derivatives
  double max_abs = 0.0;
  double max_step = 0.0;     // largest |xi_{k+1} - xi_k| after unwrapping
  std::size_t branch_jumps = 0;
  std::size_t samples = 0;
};

/// Residual of d xi/dt = dH0/d(value) - <dH0/d(value)> over one period of the orbit through z.
PdeResidual xi_pde_residual(const MorseDrive& d, PhasePoint z, const PdeConfig& cfg = {});

struct IncrementCheck {
  double integral = 0.0;     // int (dH0/d(value) - mean) dt from z_a to z_b
  double closed_form = 0.0;  // xi(z_b) - xi(z_a)
  double discrepancy = 0.0;
  double elapsed = 0.0;      // flow time from z_a to z_b
};

/// Integrates along the H0 flow from z_a until it reaches z_b. Throws std::invalid_argument when the
/// points are not on one shell (|dH0| >= 1e-10).
IncrementCheck generator_increment_check(const MorseDrive& d, PhasePoint z_a, PhasePoint z_b);

/// Remove 2 pi-like jumps of size `period` from a sampled series; returns the number removed.
std::size_t unwrap(std::vector<double>& values, double period);

// -- suite ---------------------------------------------------------------------

struct OracleCheck {
  std::string mode;
  std::string check;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct OracleReport {
  std::uint64_t seed = 0;
  std::vector<OracleCheck> checks;
  double quoted_width_omega_deviation = 0.0;  // max relative gap of the quoted width form

  bool all_passed() const;
  std::size_t passed() const;
};

OracleReport run_suite(std::uint64_t seed = 20260101);
std::string report_json(const OracleReport& r);

}  // namespace sta::morse
