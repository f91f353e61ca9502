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
#include <random>

#include "sta/classical.hpp"
#include "sta/errors.hpp"

using namespace sta;
using std::numbers::pi;

namespace {

ScheduleSample sample(double gamma, double dgamma, double f, double df, double ddgamma = 0.0, double ddf = 0.0) {
  ScheduleSample x;
  x.gamma = gamma;
  x.dgamma = dgamma;
  x.ddgamma = ddgamma;
  x.f = f;
  x.df = df;
  x.ddf = ddf;
  return x;
}

const PotentialSpec kMorse(Morse{1.0, 1.0}, 0.5);

double max_rel_drift(const Trajectory& tr, double TrajectorySample::*field) {
  const double ref = tr.samples.front().*field;
  double worst = 0.0;
  for (const auto& s : tr.samples) worst = std::max(worst, std::abs(s.*field - ref) / std::abs(ref));
  return worst;
}

}  // namespace

TEST(Classical, HamiltonianCdReducesToBare) {
  const PotentialSpec spec(Harmonic{1.0});
  const auto x = sample(1.3, 0.0, 0.2, 0.0);
  const PhasePoint z{0.7, -0.4};
  EXPECT_DOUBLE_EQ(hamiltonian_value(Frame::cd_H, spec, x, z), hamiltonian_value(Frame::bare_H0, spec, x, z));
}

TEST(Classical, HamiltonianCdTerm) {
  const PotentialSpec spec(Harmonic{1.0});
  const auto x = sample(1.0, 0.5, 0.0, 0.0);
  const PhasePoint z{1.0, 1.0};
  EXPECT_NEAR(hamiltonian_value(Frame::cd_H, spec, x, z) - hamiltonian_value(Frame::bare_H0, spec, x, z), 0.5, 1e-15);
}

TEST(Classical, HamiltonianTildeIsScaledInvariant) {
  const DrivenPotential dp{kMorse, make_quintic_schedule(1.7, 0.0, 1.0)};
  const PhasePoint zt{0.3, 0.2};
  const double g = dp.schedule.local(0.4).gamma;
  EXPECT_NEAR(hamiltonian_value(Frame::tilde_Htilde, dp, zt, 0.4), invariant_I(Frame::tilde_Htilde, dp, zt, 0.4) / (g * g),
              1e-15);
}

TEST(Classical, HarmonicVolume) {
  const PotentialSpec spec(Harmonic{1.7}, 1.0);
  for (double E : {0.1, 1.0, 3.5}) EXPECT_NEAR(phase_space_volume(spec, E), 2 * pi * E / 1.7, 1e-10 * E);
  EXPECT_EQ(phase_space_volume(spec, 0.0), 0.0);
  const PotentialSpec heavy(Harmonic{0.8}, 2.5);
  EXPECT_NEAR(phase_space_volume(heavy, 1.2), 2 * pi * 1.2 / 0.8, 1e-9);
}

TEST(Classical, MorseVolumeConventions) {
  const double full = 2 * pi * (1.0 - 1.0 / std::sqrt(2.0));
  EXPECT_NEAR(phase_space_volume(kMorse, -0.5), full, 1e-10);
  EXPECT_NEAR(phase_space_volume(kMorse, -0.5, 1.0, 0.0, LoopConvention::half_loop), 0.5 * full, 1e-10);
  EXPECT_EQ(phase_space_volume(kMorse, -1.0), 0.0);
  EXPECT_THROW(phase_space_volume(kMorse, 0.2), NoTurningPoint);
  EXPECT_THROW(phase_space_volume(kMorse, -1.5), std::out_of_range);
}

TEST(Classical, MorseTurningPoints) {
  const auto tp = shell_turning_points(kMorse, -0.5);
  EXPECT_NEAR(tp.q1, -std::log(1.0 + 1.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(tp.q2, -std::log(1.0 - 1.0 / std::sqrt(2.0)), 1e-12);
}

TEST(Classical, ScalingIdentityAgainstDirectQuadrature) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> G(0.6, 1.8), F(-1.0, 1.0), E(-0.9, -0.05);
  for (int i = 0; i < 10; ++i) {
    const double g = G(rng), f = F(rng), e = E(rng) / (g * g);
    Custom c;
    c.U = [g, f](double q) { return (std::exp(-2 * (q - f) / g) - 2 * std::exp(-(q - f) / g)) / (g * g); };
    const PotentialSpec direct(c, 0.5);
    const double lhs = phase_space_volume(direct, e, 1.0, 0.0, LoopConvention::full_loop, f);
    EXPECT_NEAR(lhs, phase_space_volume(kMorse, e, g, f), 1e-9 * lhs);
    EXPECT_NEAR(phase_space_volume(kMorse, e, g, f), phase_space_volume(kMorse, g * g * e), 1e-14);
  }
}

TEST(Classical, BoxOmega) {
  const DrivenPotential dp{PotentialSpec(Box{1.5}), DriveSchedule::constant(1.0)};
  EXPECT_NEAR(adiabatic_invariant(dp, {0.4, -0.8}, 0.5), 2 * 1.5 * 0.8, 1e-15);
}

TEST(Classical, HarmonicOmegaOnShell) {
  const double w0 = 1.3, E = 0.9;
  const DrivenPotential dp{PotentialSpec(Harmonic{w0}), DriveSchedule::constant(1.0)};
  for (double th : {0.0, 0.7, 2.0, 4.0}) {
    const PhasePoint z{std::sqrt(2 * E) / w0 * std::cos(th), std::sqrt(2 * E) * std::sin(th)};
    EXPECT_NEAR(adiabatic_invariant(dp, z, 0.0), 2 * pi * E / w0, 1e-9);
  }
}

TEST(Classical, Maps) {
  const auto still = sample(1.0, 0.0, 0.0, 0.0);
  const PhasePoint z{0.3, -1.1};
  const auto zl = to_local(z, still, 1.0);
  EXPECT_EQ(zl.q, z.q);
  EXPECT_EQ(zl.p, z.p);
  const auto zt = to_tilde({2.0, 1.0}, sample(2.0, 0.0, 0.0, 0.0));
  EXPECT_DOUBLE_EQ(zt.q, 1.0);
  EXPECT_DOUBLE_EQ(zt.p, 2.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto x = sample(1.0 + 0.5 * U(rng) + 0.6, U(rng), U(rng), U(rng));
    const PhasePoint w{U(rng), U(rng)};
    const double m = 0.5 + std::abs(U(rng));
    const auto a = local_to_tilde(to_local(w, x, m), x, m);
    const auto b = to_tilde(w, x);
    EXPECT_NEAR(a.q, b.q, 1e-14);
    EXPECT_NEAR(a.p, b.p, 1e-14);
    const auto back = from_local(to_local(w, x, m), x, m);
    EXPECT_NEAR(back.p, w.p, 1e-14);
    const auto back2 = tilde_to_local(local_to_tilde(w, x, m), x, m);
    EXPECT_NEAR(back2.q, w.q, 1e-14);
    EXPECT_NEAR(back2.p, w.p, 1e-14);
  }
}

TEST(Classical, InvariantFrameConsistency) {
  const DrivenPotential dp{kMorse, make_quintic_schedule(1.8, 0.6, 1.0)};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-0.5, 0.5), T(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double t = T(rng);
    const PhasePoint z{U(rng) + 0.5, U(rng)};
    const auto x = dp.schedule.local(t);
    const double a = invariant_I(Frame::cd_H, dp, z, t);
    const double b = invariant_I(Frame::local_Hbar, dp, to_local(z, x, dp.spec.mass), t);
    const double c = invariant_I(Frame::tilde_Htilde, dp, to_tilde(z, x), t);
    EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
    EXPECT_NEAR(a, c, 1e-12 * std::abs(a));
  }
}

TEST(Classical, HarmonicEnergyDrift) {
  const double w0 = 1.0;
  const double T = 2 * pi / w0;
  const DrivenPotential dp{PotentialSpec(Harmonic{w0}), DriveSchedule::constant(100 * T)};
  IntegratorConfig cfg;
  cfg.samples = 101;
  cfg.track_omega = false;
  cfg.tolerance = 1e-13;  // dopri5 at 1e-12 accumulates about 4e-10 over 100 periods
  const auto tr = integrate(Frame::bare_H0, dp, {1.0, 0.0}, 0.0, 100 * T, cfg);
  ASSERT_TRUE(tr.complete);
  EXPECT_LT(max_rel_drift(tr, &TrajectorySample::H), 1e-10);
}

TEST(Classical, Rk4FixedStepConverges) {
  const DrivenPotential dp{PotentialSpec(Harmonic{1.0}), DriveSchedule::constant(2 * pi)};
  IntegratorConfig cfg;
  cfg.method = Method::rk4_fixed;
  cfg.step = 1e-3;
  cfg.samples = 5;
  const auto tr = integrate(Frame::bare_H0, dp, {1.0, 0.0}, 0.0, 2 * pi, cfg);
  EXPECT_NEAR(tr.samples.back().z.q, 1.0, 1e-11);
}

TEST(Classical, MorseCdConservesOmega) {
  const DrivenPotential dp{kMorse, make_quintic_schedule(1.6, 0.0, 3.0)};
  IntegratorConfig cfg;
  cfg.samples = 61;
  const auto tr = integrate(Frame::cd_H, dp, {0.3, 0.2}, 0.0, 3.0, cfg);
  ASSERT_TRUE(tr.complete);
  EXPECT_LT(max_rel_drift(tr, &TrajectorySample::omega), 1e-8);
  EXPECT_LT(max_rel_drift(tr, &TrajectorySample::I), 1e-8);
}

TEST(Classical, LocalFrameNewtonResidual) {
  const DrivenPotential dp{kMorse, make_quintic_schedule(1.5, 0.8, 2.0)};
  IntegratorConfig cfg;
  cfg.samples = 2001;
  cfg.track_omega = false;
  const auto tr = integrate(Frame::local_Hbar, dp, {0.2, 0.1}, 0.0, 2.0, cfg);
  const double h = 2.0 / 2000;
  const double m = dp.spec.mass;
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 1; i + 1 < tr.samples.size(); ++i) {
    const double qdd = (tr.samples[i + 1].z.q - 2 * tr.samples[i].z.q + tr.samples[i - 1].z.q) / (h * h);
    const auto x = dp.schedule.local(tr.samples[i].t);
    const double q = tr.samples[i].z.q;
    const double rhs = -eval_dU0(dp.spec, (q - x.f) / x.gamma) / std::pow(x.gamma, 3) +
                       m * x.ddgamma / x.gamma * (q - x.f) + m * x.ddf;
    sum += (m * qdd - rhs) * (m * qdd - rhs);
    ++n;
  }
  EXPECT_LT(std::sqrt(sum / n), 1e-6);
}

TEST(Classical, FramesShareConfigurationTrack) {
  const DrivenPotential dp{kMorse, make_quintic_schedule(1.7, 0.5, 2.0)};
  const PhasePoint z0{0.25, -0.3};
  IntegratorConfig cfg;
  cfg.samples = 41;
  const auto a = integrate(Frame::cd_H, dp, z0, 0.0, 2.0, cfg);
  const auto b = integrate(Frame::local_Hbar, dp, to_local(z0, dp.schedule, 0.0, 0.5), 0.0, 2.0, cfg);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_NEAR(a.samples[i].z.q, b.samples[i].z.q, 1e-8);
    const auto shifted = to_local(a.samples[i].z, dp.schedule, a.samples[i].t, 0.5);
    EXPECT_NEAR(shifted.p, b.samples[i].z.p, 1e-8);
  }
  EXPECT_NEAR(b.samples.back().omega, b.samples.front().omega, 1e-7 * b.samples.front().omega);
}

TEST(Classical, ReconstructionMatchesDirect) {
  const DrivenPotential dp{kMorse, make_quintic_schedule(2.0, 0.0, 2.5)};
  const PhasePoint z0{0.4, 0.1};
  IntegratorConfig cfg;
  cfg.samples = 51;
  const auto tilde = integrate(Frame::tilde_Htilde, dp, to_tilde(z0, dp.schedule, 0.0), 0.0, 2.5, cfg);
  const auto [cd, local] = reconstruct_from_tilde(tilde, dp);
  const auto direct = integrate(Frame::cd_H, dp, z0, 0.0, 2.5, cfg);
  const auto direct_local = integrate(Frame::local_Hbar, dp, to_local(z0, dp.schedule, 0.0, 0.5), 0.0, 2.5, cfg);
  for (std::size_t i = 0; i < cd.samples.size(); ++i) {
    EXPECT_NEAR(cd.samples[i].z.q, direct.samples[i].z.q, 1e-6);
    EXPECT_NEAR(cd.samples[i].z.p, direct.samples[i].z.p, 1e-6);
    EXPECT_NEAR(local.samples[i].z.p, direct_local.samples[i].z.p, 1e-6);
  }
}

TEST(Classical, ReconstructionTransportOnly) {
  const DrivenPotential dp{PotentialSpec(Harmonic{1.0}), make_quintic_schedule(1.0, 2.0, 1.5)};
  IntegratorConfig cfg;
  cfg.samples = 11;
  const auto tilde = integrate(Frame::tilde_Htilde, dp, {0.5, 0.0}, 0.0, 1.5, cfg);
  const auto [cd, local] = reconstruct_from_tilde(tilde, dp);
  for (std::size_t i = 0; i < tilde.samples.size(); ++i) {
    const auto x = dp.schedule.local(tilde.samples[i].t);
    EXPECT_NEAR(local.samples[i].z.q, tilde.samples[i].z.q + x.f, 1e-15);
    EXPECT_NEAR(local.samples[i].z.p, tilde.samples[i].z.p + x.df, 1e-15);
    EXPECT_NEAR(tilde.samples[i].tau, tilde.samples[i].t, 1e-12);
  }
  Trajectory bad = tilde;
  bad.frame = Frame::cd_H;
  EXPECT_THROW(reconstruct_from_tilde(bad, dp), std::invalid_argument);
}

TEST(Classical, GeneratorConditionIsSecondOrder) {
  const PhasePoint z{0.3, -0.4};
  const double d1 = generator_step_defect(kMorse, z, 1.2, 0.1, 1e-3);
  const double d2 = generator_step_defect(kMorse, z, 1.2, 0.1, 5e-4);
  EXPECT_NEAR(d1 / d2, 4.0, 0.05);
  // A wrong generator (no momentum contraction) is only first order.
  EXPECT_LT(std::abs(d1), 1e-5);
}

TEST(Classical, BoxStaticBounce) {
  const auto run = box_simulate({1.0, 1.0, 0.0, 1.0}, {0.3, 0.7}, Frame::cd_H, 0.0, 20.0);
  for (const auto& s : run.trajectory.samples) {
    EXPECT_NEAR(std::abs(s.z.p), 0.7, 1e-15);
    EXPECT_NEAR(s.omega, 1.4, 1e-15);
    EXPECT_GE(s.z.q, 0.0);
    EXPECT_LE(s.z.q, 1.0);
  }
  EXPECT_GT(run.events.size(), 10u);
}

TEST(Classical, BoxCdConservesLp) {
  const BoxProtocol box{1.0, 2.0, 0.5, 3.5};
  const auto run = box_simulate(box, {0.4, 1.3}, Frame::cd_H, 0.0, 4.0, 1.0, 801);
  const double ref = box.width(0.0) * std::abs(run.trajectory.samples.front().z.p);
  for (const auto& s : run.trajectory.samples)
    EXPECT_NEAR(box.width(s.t) * std::abs(s.z.p), ref, 1e-12 * ref);
  const double E0 = 1.3 * 1.3 / 2;
  const double E1 = run.trajectory.samples.back().z.p * run.trajectory.samples.back().z.p / 2;
  EXPECT_NEAR(E1 / E0, 0.25, 1e-12);
}

TEST(Classical, BoxLocalImpulsesRestoreShell) {
  const BoxProtocol box{1.0, 2.0, 0.5, 2.0};
  const auto loc = box_simulate(box, {0.4, 1.3}, Frame::local_Hbar, 0.0, 3.0, 1.0, 601);
  const auto cd = box_simulate(box, {0.4, 1.3}, Frame::cd_H, 0.0, 3.0, 1.0, 601);
  int impulses = 0;
  for (const auto& e : loc.events)
    impulses += e.kind == BoxEventKind::impulse_on || e.kind == BoxEventKind::impulse_off;
  EXPECT_EQ(impulses, 2);
  for (std::size_t i = 0; i < cd.trajectory.samples.size(); ++i) {
    const auto& a = cd.trajectory.samples[i];
    const auto& b = loc.trajectory.samples[i];
    EXPECT_NEAR(a.z.q, b.z.q, 1e-10);
    if (a.t > box.t1) EXPECT_NEAR(std::abs(b.z.p), 1.3 / 2.0, 1e-10);
  }
}

TEST(Classical, BoxRejectsOutsideStart) {
  EXPECT_THROW(box_simulate({1.0, 2.0, 0.0, 1.0}, {1.2, 0.1}, Frame::cd_H, 0.0, 1.0), std::invalid_argument);
}
