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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sta/errors.hpp"
#include "sta/schedules.hpp"

using namespace sta;

namespace {

double central_diff(const DriveSchedule& s, double t, double h, double ScheduleSample::*field) {
  return ((s.local(t + h).*field) - (s.local(t - h).*field)) / (2.0 * h);
}

double trapezoid_tau(const DriveSchedule& s, double t, int panels) {
  const double h = t / panels;
  double sum = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double g = s.local(h * i).gamma;
    const double w = (i == 0 || i == panels) ? 0.5 : 1.0;
    sum += w / (g * g);
  }
  return sum * h;
}

}  // namespace

TEST(Schedules, CubicBoundaryValues) {
  const auto s = make_cubic_schedule(2.0, 3.0, 1.5);
  const auto a = s.local(0.0), b = s.local(1.5);
  EXPECT_EQ(a.gamma, 1.0);
  EXPECT_EQ(a.dgamma, 0.0);
  EXPECT_EQ(a.f, 0.0);
  EXPECT_EQ(a.df, 0.0);
  EXPECT_NEAR(b.gamma, 2.0, 1e-12);
  EXPECT_NEAR(b.dgamma, 0.0, 1e-12);
  EXPECT_NEAR(b.f, 3.0, 1e-12);
  EXPECT_NEAR(b.df, 0.0, 1e-12);
}

TEST(Schedules, CubicMidpointTransport) {
  const auto s = make_cubic_schedule(1.0, 1.0, 2.0);
  EXPECT_NEAR(s.local(1.0).f, 0.5, 1e-15);
}

TEST(Schedules, QuinticBoundaryValues) {
  const auto s = make_quintic_schedule(3.0, -2.0, 0.7);
  for (double t : {0.0, 0.7}) {
    const auto x = s.local(t);
    EXPECT_NEAR(x.dgamma, 0.0, 1e-12);
    EXPECT_NEAR(x.ddgamma, 0.0, 1e-12);
    EXPECT_NEAR(x.df, 0.0, 1e-12);
    EXPECT_NEAR(x.ddf, 0.0, 1e-12);
  }
  EXPECT_NEAR(s.local(0.7).gamma, 3.0, 1e-12);
  EXPECT_NEAR(s.local(0.7).f, -2.0, 1e-12);
}

TEST(Schedules, QuinticMidpoint) {
  EXPECT_NEAR(make_quintic_schedule(3.0, 0.0, 1.0).local(0.5).gamma, 2.0, 1e-15);
  EXPECT_NEAR(make_quintic_schedule(2.0, 0.0, 1.0).local(0.5).dgamma, 1.875, 1e-14);
}

TEST(Schedules, QuinticTransportPolynomial) {
  const auto s = make_quintic_schedule(1.0, 5.0, 1.0);
  for (double t : {0.1, 0.37, 0.8}) {
    const double expect = 5.0 * (10 * std::pow(t, 3) - 15 * std::pow(t, 4) + 6 * std::pow(t, 5));
    EXPECT_NEAR(s.local(t).f, expect, 1e-13);
  }
  EXPECT_NEAR(s.local(1.0).f, 5.0, 1e-14);
}

TEST(Schedules, ConstantSchedule) {
  const auto s = DriveSchedule::constant(3.0);
  const auto x = s.eval(1.3);
  EXPECT_EQ(x.gamma, 1.0);
  EXPECT_EQ(x.dgamma, 0.0);
  EXPECT_EQ(x.ddgamma, 0.0);
  EXPECT_EQ(x.f, 0.0);
  EXPECT_NEAR(x.tau, 1.3, 1e-15);
  EXPECT_NEAR(DriveSchedule::constant(3.0, 2.0).tau(2.0), 0.5, 1e-15);
}

TEST(Schedules, DerivativesMatchFiniteDifferences) {
  for (auto s : {make_cubic_schedule(2.5, 1.5, 2.0), make_quintic_schedule(0.5, -1.0, 2.0)}) {
    const double h = 1e-5 * s.duration();
    for (double t : {0.3, 0.9, 1.4, 1.7}) {
      const auto x = s.local(t);
      EXPECT_NEAR(central_diff(s, t, h, &ScheduleSample::gamma), x.dgamma,
                  1e-6 * std::abs(x.dgamma));
      EXPECT_NEAR(central_diff(s, t, h, &ScheduleSample::dgamma), x.ddgamma,
                  1e-6 * std::abs(x.ddgamma));
      EXPECT_NEAR(central_diff(s, t, h, &ScheduleSample::f), x.df, 1e-6 * std::abs(x.df));
      EXPECT_NEAR(central_diff(s, t, h, &ScheduleSample::df), x.ddf, 1e-6 * std::abs(x.ddf));
    }
  }
}

TEST(Schedules, SampledReproducesQuintic) {
  const auto q = make_quintic_schedule(2.0, 1.0, 1.0);
  const int n = 1001;
  std::vector<double> g(n), f(n);
  for (int i = 0; i < n; ++i) {
    const auto x = q.local(i / double(n - 1));
    g[i] = x.gamma;
    f[i] = x.f;
  }
  const auto s = DriveSchedule::sampled(g, f, 1.0);
  EXPECT_EQ(s.kind(), ScheduleKind::custom_sampled);
  for (double t : {0.2, 0.5, 0.77}) {
    const auto a = s.local(t), b = q.local(t);
    EXPECT_NEAR(a.gamma, b.gamma, 1e-9);
    EXPECT_NEAR(a.dgamma, b.dgamma, 1e-4);
    EXPECT_NEAR(a.ddgamma, b.ddgamma, 1e-4);
    EXPECT_NEAR(a.df, b.df, 1e-4);
  }
}

TEST(Schedules, OutOfRangeTime) {
  const auto s = make_quintic_schedule(2.0, 0.0, 1.0);
  EXPECT_THROW(s.eval(1.01), std::out_of_range);
  EXPECT_THROW(s.eval(-0.01), std::out_of_range);
  EXPECT_THROW(make_cubic_schedule(2.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(make_cubic_schedule(-1.0, 0.0, 1.0), std::invalid_argument);
}

TEST(Schedules, TauAgainstTrapezoidOracle) {
  const auto s = make_quintic_schedule(2.0, 0.0, 1.0);
  EXPECT_NEAR(s.tau(1.0), trapezoid_tau(s, 1.0, 1000000), 1e-9);
  EXPECT_EQ(s.tau(0.0), 0.0);
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double v = s.tau(i / 50.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Schedules, TauOnGridMatchesPointwise) {
  const auto s = make_quintic_schedule(0.5, 0.0, 2.0);
  std::vector<double> t{0.0, 0.4, 0.9, 1.3, 2.0};
  const auto tau = tau_on_grid(s, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(tau[i], s.tau(t[i]), 1e-10);
}

TEST(Schedules, ChiSignAndExtrema) {
  const double T = 1.7;
  const auto s = make_quintic_schedule(1.0, 2.0, T);
  EXPECT_NEAR(transport_amplitude_chi(s, 0.0), 0.0, 1e-14);
  EXPECT_NEAR(transport_amplitude_chi(s, T), 0.0, 1e-12);
  for (int i = 1; i < 50; ++i) {
    const double t = T * i / 100.0;
    EXPECT_LT(transport_amplitude_chi(s, t), 0.0);
    EXPECT_GT(transport_amplitude_chi(s, T - t), 0.0);
    EXPECT_NEAR(transport_amplitude_chi(s, T - t), -transport_amplitude_chi(s, t), 1e-12);
  }
  const double mag = 10.0 * std::sqrt(3.0) / 3.0 / (T * T);
  const double t_minus = T * (3.0 - std::sqrt(3.0)) / 6.0;
  const double t_plus = T * (3.0 + std::sqrt(3.0)) / 6.0;
  EXPECT_NEAR(transport_amplitude_chi(s, t_minus), -mag, 1e-12);
  EXPECT_NEAR(transport_amplitude_chi(s, t_plus), mag, 1e-12);
  EXPECT_THROW(transport_amplitude_chi(make_quintic_schedule(2.0, 0.0, 1.0), 0.5),
               UndefinedAmplitude);
}

TEST(Schedules, CdFrequencyConstant) {
  std::vector<FrequencySample> w{{0.0, 2.0, 0.0, 0.0}, {1.0, 2.0, 0.0, 0.0}};
  for (double v : cd_harmonic_frequency(w)) EXPECT_DOUBLE_EQ(v, 4.0);
  std::vector<double> flat(20, 1.5);
  for (double v : cd_harmonic_frequency(flat, 3.0)) EXPECT_NEAR(v, 2.25, 1e-12);
  w[1].omega = 0.0;
  EXPECT_THROW(cd_harmonic_frequency(w), std::invalid_argument);
}

TEST(Schedules, CdFrequencyIdentity) {
  const double w0 = 1.3;
  const auto s = make_quintic_schedule(2.0, 0.0, 0.8);
  std::vector<FrequencySample> w;
  for (int i = 0; i <= 40; ++i) {
    const auto x = s.local(0.8 * i / 40.0);
    const double g = x.gamma;
    // omega = w0 / gamma^2 and its analytic time derivatives
    const double om = w0 / (g * g);
    const double dom = -2.0 * w0 * x.dgamma / (g * g * g);
    const double ddom = -2.0 * w0 * (x.ddgamma / (g * g * g) - 3.0 * x.dgamma * x.dgamma / (g * g * g * g));
    w.push_back({x.t, om, dom, ddom});
  }
  const auto out = cd_harmonic_frequency(w);
  bool negative = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto x = s.local(w[i].t);
    const double expect = w[i].omega * w[i].omega - x.ddgamma / x.gamma;
    EXPECT_NEAR(out[i], expect, 1e-8 * std::max(1.0, std::abs(expect)));
    negative = negative || out[i] < 0.0;
  }
  EXPECT_TRUE(negative);  // fast expansion passes through an inverted trap
}

TEST(Schedules, ConsistencyConditions) {
  const auto still = consistency_at(DriveSchedule::constant(1.0), 3.0, 2.0, 0.4);
  EXPECT_EQ(still.omega_sq, 4.0);
  EXPECT_EQ(still.force, 0.0);
  EXPECT_EQ(still.epsilon, 1.0);

  const auto s = make_quintic_schedule(2.0, 1.0, 1.0);
  for (const auto& c : consistency_conditions(s, 2.0, 1.0, 11)) EXPECT_EQ(c.epsilon, 1.0);
  const auto series = consistency_conditions(s, 4.0, 1.0, 11);
  EXPECT_EQ(series.front().epsilon, 1.0);
  EXPECT_NEAR(series.back().omega_sq, 1.0 / 16.0, 1e-12);
  EXPECT_NEAR(series.back().epsilon, 4.0, 1e-12);
}
