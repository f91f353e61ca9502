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

#include <cmath>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "sta/spline.hpp"

namespace sta {

enum class ScheduleKind { cubic, quintic, constant, custom_sampled };

std::string_view to_string(ScheduleKind kind);

/// Control functions and their derivatives at one instant. `tau` is the
/// time-like variable tau(t) = int_0^t gamma^-2.
struct ScheduleSample {
  double t = 0.0;
  double gamma = 1.0, dgamma = 0.0, ddgamma = 0.0;
  double f = 0.0, df = 0.0, ddf = 0.0;
  double tau = 0.0;
};

/// Driving protocol gamma(t) (dilation) and f(t) (translation) on [0, duration].
///
/// Immutable; copies share the spline tables of sampled schedules. Every
/// evaluation is lazy, so integrators choose their own time steps.
class DriveSchedule {
 public:
  /// Static protocol gamma = gamma0, f = f0. gamma0 != 1 is allowed for
  /// reparametrization checks, but drivers expect gamma(0) = 1.
  static DriveSchedule constant(double duration, double gamma0 = 1.0, double f0 = 0.0);
  static DriveSchedule cubic(double gamma_final, double f_final, double duration);
  static DriveSchedule quintic(double gamma_final, double f_final, double duration);
  /// Uniform samples of gamma and f over [0, duration], natural cubic spline between them.
  static DriveSchedule sampled(std::span<const double> gamma, std::span<const double> f,
                               double duration);

  ScheduleKind kind() const { return kind_; }
  double gamma_final() const { return gamma_final_; }
  double f_final() const { return f_final_; }
  double duration() const { return duration_; }

  /// gamma, f and derivatives, without tau. Throws std::out_of_range outside [0, duration].
  ScheduleSample local(double t) const;
  /// Same as local() plus tau(t).
  ScheduleSample eval(double t) const;
  double tau(double t) const;
  /// int_0^t fdot^2 ds, the global phase carried by the transport part of the CD unitary.
  double transport_action(double t) const;

 private:
  DriveSchedule() = default;
  double clamp_time(double t) const;

  ScheduleKind kind_ = ScheduleKind::constant;
  double gamma_final_ = 1.0;
  double f_final_ = 0.0;
  double duration_ = 1.0;
  double gamma0_ = 1.0;
  double f0_ = 0.0;
  std::shared_ptr<const NaturalCubicSpline> gamma_spline_;
  std::shared_ptr<const NaturalCubicSpline> f_spline_;
};

DriveSchedule make_cubic_schedule(double gamma_final, double f_final, double duration);
DriveSchedule make_quintic_schedule(double gamma_final, double f_final, double duration);
ScheduleSample eval_schedule(const DriveSchedule& s, double t);
double tau_of_t(const DriveSchedule& s, double t);

/// tau at each (nondecreasing) time, accumulated panel by panel.
std::vector<double> tau_on_grid(const DriveSchedule& s, std::span<const double> times);

/// Adaptive Simpson quadrature of a smooth integrand on [a, b] to absolute tolerance `tol`.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40);

/// chi(t) = -fddot(t) / f_F. Throws UndefinedAmplitude when f_F == 0.
double transport_amplitude_chi(const DriveSchedule& s, double t);

/// A trap-frequency trajectory sample with its first two time derivatives.
struct FrequencySample {
  double t = 0.0;
  double omega = 0.0;
  double domega = 0.0;
  double ddomega = 0.0;
};

/// omega^2 - (3/4) omegadot^2 / omega^2 + (1/2) omegaddot / omega at every sample.
/// Negative outputs (inverted trap) are returned as is.
std::vector<double> cd_harmonic_frequency(std::span<const FrequencySample> omega);
/// Uniformly sampled omega(t) on [0, duration]; derivatives from a natural cubic spline fit.
std::vector<double> cd_harmonic_frequency(std::span<const double> omega, double duration);

struct ConsistencySample {
  double t = 0.0;
  double omega_sq = 0.0;  // omega0^2 / gamma^4 - gammaddot / gamma
  double force = 0.0;     // F = -fddot
  double epsilon = 1.0;   // gamma^(alpha - 2)
};

ConsistencySample consistency_at(const DriveSchedule& s, double alpha, double omega0, double t);
/// Uniform samples over [0, duration], endpoints included.
std::vector<ConsistencySample> consistency_conditions(const DriveSchedule& s, double alpha,
                                                      double omega0, std::size_t samples = 1000);

// ---------------------------------------------------------------------------

namespace detail {
template <class F>
double simpson_recurse(F& f, double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth) {
  if (b == a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace sta
