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

#include "sta/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sta/errors.hpp"

namespace sta {

namespace {

struct Shape {
  double h, d1, d2;  // derivatives with respect to s = t / duration
};

Shape cubic_shape(double s) {
  return {s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s), 6.0 - 12.0 * s};
}

Shape quintic_shape(double s) {
  const double s2 = s * s, s3 = s2 * s;
  return {s3 * (10.0 - 15.0 * s + 6.0 * s2), 30.0 * s2 * (1.0 - 2.0 * s + s2),
          60.0 * s * (1.0 - 3.0 * s + 2.0 * s2)};
}

void check_polynomial_args(double gamma_final, double f_final, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("schedule duration must be positive, got " + std::to_string(duration));
  if (!(gamma_final > 0.0) || !std::isfinite(gamma_final))
    throw std::invalid_argument("gamma_final must be positive, got " + std::to_string(gamma_final));
  if (!std::isfinite(f_final)) throw std::invalid_argument("f_final must be finite");
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::cubic: return "cubic";
    case ScheduleKind::quintic: return "quintic";
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::custom_sampled: return "custom-sampled";
  }
  return "unknown";
}

DriveSchedule DriveSchedule::constant(double duration, double gamma0, double f0) {
  check_polynomial_args(gamma0, f0, duration);
  DriveSchedule s;
  s.kind_ = ScheduleKind::constant;
  s.duration_ = duration;
  s.gamma0_ = s.gamma_final_ = gamma0;
  s.f0_ = s.f_final_ = f0;
  return s;
}

DriveSchedule DriveSchedule::cubic(double gamma_final, double f_final, double duration) {
  check_polynomial_args(gamma_final, f_final, duration);
  DriveSchedule s;
  s.kind_ = ScheduleKind::cubic;
  s.gamma_final_ = gamma_final;
  s.f_final_ = f_final;
  s.duration_ = duration;
  return s;
}

DriveSchedule DriveSchedule::quintic(double gamma_final, double f_final, double duration) {
  DriveSchedule s = cubic(gamma_final, f_final, duration);
  s.kind_ = ScheduleKind::quintic;
  return s;
}

DriveSchedule DriveSchedule::sampled(std::span<const double> gamma, std::span<const double> f,
                                     double duration) {
  if (gamma.size() != f.size())
    throw std::invalid_argument("gamma and f sample tables differ in length");
  if (gamma.size() < 3) throw std::invalid_argument("sampled schedule needs at least 3 samples");
  check_polynomial_args(gamma.back(), f.back(), duration);
  for (double g : gamma)
    if (!(g > 0.0)) throw std::invalid_argument("sampled gamma must stay positive");
  DriveSchedule s;
  s.kind_ = ScheduleKind::custom_sampled;
  s.duration_ = duration;
  s.gamma0_ = gamma.front();
  s.f0_ = f.front();
  s.gamma_final_ = gamma.back();
  s.f_final_ = f.back();
  const double step = duration / static_cast<double>(gamma.size() - 1);
  s.gamma_spline_ = std::make_shared<const NaturalCubicSpline>(0.0, step, gamma);
  s.f_spline_ = std::make_shared<const NaturalCubicSpline>(0.0, step, f);
  return s;
}

double DriveSchedule::clamp_time(double t) const {
  const double slack = 1e-12 * duration_;
  if (!(t >= -slack && t <= duration_ + slack))
    throw std::out_of_range("time " + std::to_string(t) + " outside schedule range [0, " +
                            std::to_string(duration_) + "]");
  return std::clamp(t, 0.0, duration_);
}

ScheduleSample DriveSchedule::local(double t) const {
  t = clamp_time(t);
  ScheduleSample out;
  out.t = t;
  switch (kind_) {
    case ScheduleKind::constant:
      out.gamma = gamma0_;
      out.f = f0_;
      break;
    case ScheduleKind::cubic:
    case ScheduleKind::quintic: {
      const double s = t / duration_;
      const Shape h = kind_ == ScheduleKind::cubic ? cubic_shape(s) : quintic_shape(s);
      const double inv = 1.0 / duration_, inv2 = inv * inv;
      const double dg = gamma_final_ - 1.0;
      out.gamma = 1.0 + dg * h.h;
      out.dgamma = dg * h.d1 * inv;
      out.ddgamma = dg * h.d2 * inv2;
      out.f = f_final_ * h.h;
      out.df = f_final_ * h.d1 * inv;
      out.ddf = f_final_ * h.d2 * inv2;
      break;
    }
    case ScheduleKind::custom_sampled: {
      const Jet g = gamma_spline_->eval(t);
      const Jet f = f_spline_->eval(t);
      out.gamma = g.value;
      out.dgamma = g.d1;
      out.ddgamma = g.d2;
      out.f = f.value;
      out.df = f.d1;
      out.ddf = f.d2;
      break;
    }
  }
  return out;
}

double DriveSchedule::tau(double t) const {
  t = clamp_time(t);
  if (kind_ == ScheduleKind::constant) return t / (gamma0_ * gamma0_);
  auto integrand = [this](double u) {
    const double g = local(u).gamma;
    return 1.0 / (g * g);
  };
  return adaptive_simpson(integrand, 0.0, t, 1e-10 * duration_);
}

ScheduleSample DriveSchedule::eval(double t) const {
  ScheduleSample out = local(t);
  out.tau = tau(out.t);
  return out;
}

double DriveSchedule::transport_action(double t) const {
  t = clamp_time(t);
  if (kind_ == ScheduleKind::constant) return 0.0;
  if (kind_ != ScheduleKind::custom_sampled && f_final_ == 0.0) return 0.0;
  auto integrand = [this](double u) {
    const double v = local(u).df;
    return v * v;
  };
  return adaptive_simpson(integrand, 0.0, t, 1e-12 * (1.0 + std::abs(f_final_)) * duration_);
}

DriveSchedule make_cubic_schedule(double gamma_final, double f_final, double duration) {
  return DriveSchedule::cubic(gamma_final, f_final, duration);
}

DriveSchedule make_quintic_schedule(double gamma_final, double f_final, double duration) {
  return DriveSchedule::quintic(gamma_final, f_final, duration);
}

ScheduleSample eval_schedule(const DriveSchedule& s, double t) { return s.eval(t); }

double tau_of_t(const DriveSchedule& s, double t) { return s.tau(t); }

std::vector<double> tau_on_grid(const DriveSchedule& s, std::span<const double> times) {
  std::vector<double> out(times.size(), 0.0);
  if (times.empty()) return out;
  out[0] = s.tau(times[0]);
  const double tol = 1e-12 * s.duration();
  auto integrand = [&s](double u) {
    const double g = s.local(u).gamma;
    return 1.0 / (g * g);
  };
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) throw std::invalid_argument("tau_on_grid needs nondecreasing times");
    out[i] = out[i - 1] + adaptive_simpson(integrand, times[i - 1], times[i], tol);
  }
  return out;
}

double transport_amplitude_chi(const DriveSchedule& s, double t) {
  if (s.f_final() == 0.0)
    throw UndefinedAmplitude("transport amplitude is undefined for a schedule with f_final = 0");
  return -s.local(t).ddf / s.f_final();
}

std::vector<double> cd_harmonic_frequency(std::span<const FrequencySample> omega) {
  std::vector<double> out;
  out.reserve(omega.size());
  for (const auto& w : omega) {
    if (!(w.omega > 0.0))
      throw std::invalid_argument("trap frequency must be positive at t = " + std::to_string(w.t));
    const double r = w.domega / w.omega;
    out.push_back(w.omega * w.omega - 0.75 * r * r + 0.5 * w.ddomega / w.omega);
  }
  return out;
}

std::vector<double> cd_harmonic_frequency(std::span<const double> omega, double duration) {
  if (omega.size() < 3) throw std::invalid_argument("need at least 3 frequency samples");
  for (double w : omega)
    if (!(w > 0.0)) throw std::invalid_argument("trap frequency must be positive");
  const double step = duration / static_cast<double>(omega.size() - 1);
  const NaturalCubicSpline spline(0.0, step, omega);
  std::vector<FrequencySample> samples(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double t = step * static_cast<double>(i);
    const Jet j = spline.eval(t);
    samples[i] = {t, omega[i], j.d1, j.d2};
  }
  return cd_harmonic_frequency(samples);
}

ConsistencySample consistency_at(const DriveSchedule& s, double alpha, double omega0, double t) {
  const ScheduleSample x = s.local(t);
  const double g2 = x.gamma * x.gamma;
  ConsistencySample c;
  c.t = x.t;
  c.omega_sq = omega0 * omega0 / (g2 * g2) - x.ddgamma / x.gamma;
  c.force = -x.ddf;
  c.epsilon = std::pow(x.gamma, alpha - 2.0);
  return c;
}

std::vector<ConsistencySample> consistency_conditions(const DriveSchedule& s, double alpha,
                                                      double omega0, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  std::vector<ConsistencySample> out;
  out.reserve(samples);
  const double step = s.duration() / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? s.duration() : step * static_cast<double>(i);
    out.push_back(consistency_at(s, alpha, omega0, t));
  }
  return out;
}

}  // namespace sta
