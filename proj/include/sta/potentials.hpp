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

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sta/schedules.hpp"

namespace sta {

// Base potential shapes U0(q). Units: hbar = 1; mass lives on PotentialSpec.

/// A |q|^b, b an even integer >= 2.
struct PowerLaw {
  double A = 1.0;
  int b = 2;
};
/// (m/2) omega0^2 q^2.
struct Harmonic {
  double omega0 = 1.0;
};
/// alpha2 q^2 + alpha4 q^4.
struct Quartic {
  double alpha2 = 0.5;
  double alpha4 = 0.0;
};
/// Um (exp(-2 beta q) - 2 exp(-beta q)); minimum -Um at q = 0.
struct Morse {
  double Um = 1.0;
  double beta = 1.0;
};
/// -(1/2m) alpha^2 lambda (lambda - 1) / cosh^2(alpha q), lambda > 1.
struct PoschlTeller {
  double lambda = 2.0;
  double alpha = 1.0;
};
/// -A exp(-alpha^2 q^2).
struct GaussianWell {
  double A = 1.0;
  double alpha = 1.0;
};
/// A sin^2(alpha q).
struct OpticalLattice {
  double A = 1.0;
  double alpha = 1.0;
};
/// -A for |q| < half_width, zero outside.
struct FiniteSquareWell {
  double A = 1.0;
  double half_width = 1.0;
};
/// Zero on [0, L], infinite outside. Walls are handled structurally by each engine.
struct Box {
  double L = 1.0;
};
/// sum_p alpha_p q^p, p = 0..P with P <= 32.
struct Series {
  std::vector<double> alpha;
};
/// User callable. A missing derivative falls back to central differences.
struct Custom {
  std::function<double(double)> U;
  std::function<double(double)> dU;
  std::string name = "custom";
};

using Shape = std::variant<PowerLaw, Harmonic, Quartic, Morse, PoschlTeller, GaussianWell,
                           OpticalLattice, FiniteSquareWell, Box, Series, Custom>;

inline constexpr std::size_t kMaxSeriesOrder = 32;

struct PotentialSpec {
  Shape shape;
  double mass = 1.0;

  /// Validates shape parameters; throws std::invalid_argument.
  PotentialSpec(Shape s, double m = 1.0);
};

std::string shape_name(const PotentialSpec& spec);
bool is_box(const PotentialSpec& spec);
/// Lowest value of U0 (bottom of the well), used for energy bounds.
double potential_minimum(const PotentialSpec& spec);

/// U0(q). The box reports +infinity outside [0, L].
double eval_U0(const PotentialSpec& spec, double q);
/// dU0/dq. Zero inside the box, zero away from the square-well edges.
double eval_dU0(const PotentialSpec& spec, double q);

/// U0((q - f)/gamma)/gamma^2 as a stand-alone spec with the same mass.
PotentialSpec scaled_spec(const PotentialSpec& spec, double gamma, double f = 0.0);

struct DrivenPotential {
  PotentialSpec spec;
  DriveSchedule schedule;
};

/// U0((q - f)/gamma) / gamma^2.
double eval_driven_U(const DrivenPotential& dp, double q, double t);
/// d/dq of the driven potential.
double eval_driven_dU(const DrivenPotential& dp, double q, double t);
/// Driven potential plus the local auxiliary terms
/// -(m/2)(gammaddot/gamma)(q - f)^2 - m fddot q.
double eval_local_cd_U(const DrivenPotential& dp, double q, double t);
double eval_local_cd_dU(const DrivenPotential& dp, double q, double t);

// Same, from an already evaluated schedule sample (hot loops).
double driven_U(const PotentialSpec& spec, const ScheduleSample& x, double q);
double local_cd_U(const PotentialSpec& spec, const ScheduleSample& x, double q);
double local_cd_dU(const PotentialSpec& spec, const ScheduleSample& x, double q);

/// Coefficients of the driven potential expanded about q = f.
struct SeriesCoefficients {
  double t = 0.0;
  std::vector<double> alpha;        // alpha_p(0) / gamma^(p+2)
  std::vector<double> alpha_tilde;  // with the auxiliary terms absorbed
};

/// alpha_tilde_2 subtracts m gammaddot / (2 gamma), alpha_tilde_1 subtracts m fddot and
/// alpha_tilde_0 subtracts m fddot f, so sum_p alpha_tilde_p (q - f)^p is the local CD potential.
SeriesCoefficients series_coefficients_at(std::span<const double> alpha0, const ScheduleSample& x,
                                          double mass = 1.0);
std::vector<SeriesCoefficients> series_coefficient_schedule(std::span<const double> alpha0,
                                                            const DriveSchedule& s,
                                                            std::size_t samples = 101,
                                                            double mass = 1.0);

// ---------------------------------------------------------------------------
// Catalog of scale-invariant potential families. Each row is data: parameter
// names, initial values and the exponent k of X(t) = X(0) gamma^k.

struct CatalogParameter {
  std::string name;
  double value = 1.0;
  int exponent = 0;
};

struct CatalogEntry {
  std::string name;
  std::string formula;
  std::string time_dependence;
  std::string cd_modulation;
  std::vector<CatalogParameter> parameters;
  /// U(q; parameters), parameters ordered as in `parameters`.
  std::function<double(std::span<const double>, double)> potential;
};

const std::vector<CatalogEntry>& catalog();
/// Throws NotInCatalog.
const CatalogEntry& catalog_entry(std::string_view name);
/// PotentialSpec built from the row at its initial parameters.
PotentialSpec catalog_spec(std::string_view name, double mass = 1.0);

struct ParameterTrack {
  double value = 0.0, d1 = 0.0, d2 = 0.0;
  /// -Xddot/(k X) + (k-1)/k^2 (Xdot/X)^2, which must equal -gammaddot/gamma.
  double modulation = 0.0;
};

struct ModulationSample {
  double t = 0.0;
  std::vector<ParameterTrack> parameters;
  double cd_modulation = 0.0;  // -gammaddot / gamma
};

std::vector<ModulationSample> catalog_modulation(std::string_view name, const DriveSchedule& s,
                                                 std::size_t samples = 101);
/// Driven potential evaluated from the row's time-dependent parameters.
double catalog_driven_U(const CatalogEntry& entry, const ScheduleSample& x, double q);

/// JSON array with name, parameters, scaling exponents and formula strings.
std::string catalog_json();

}  // namespace sta
