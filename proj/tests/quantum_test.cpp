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
#include <variant>

#include "sta/errors.hpp"
#include "sta/quantum.hpp"

using namespace sta;
using std::numbers::pi;

namespace {

WaveFunction gaussian(const SpatialGrid& g, double center, double sigma, double k0 = 0.0) {
  WaveFunction w(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.q(k) - center;
    w.psi[k] = std::polar(std::exp(-x * x / (4 * sigma * sigma)), k0 * x);
  }
  w.normalize();
  return w;
}

double moment2(const WaveFunction& w, double center = 0.0) {
  double s = 0.0;
  const auto rho = w.density();
  for (std::size_t k = 0; k < rho.size(); ++k) s += rho[k] * std::pow(w.grid.q(k) - center, 2);
  return s * w.grid.dq();
}

}  // namespace

TEST(Quantum, GridValidation) {
  EXPECT_THROW(SpatialGrid(128, -1, 1), std::invalid_argument);
  EXPECT_THROW(SpatialGrid(300, -1, 1), std::invalid_argument);
  EXPECT_THROW(SpatialGrid(256, 1, -1), std::invalid_argument);
  const SpatialGrid d(255 + 1, 0.0, 1.0, Boundary::dirichlet);
  EXPECT_NEAR(d.q(0), 1.0 / 257, 1e-15);
  EXPECT_LT(d.q(255), 1.0);
}

TEST(Quantum, HarmonicSpectrum) {
  const SpatialGrid g(1024, -12, 12);
  const auto e = solve_eigenstates(PotentialSpec(Harmonic{1.0}), g, 10);
  for (const auto& p : e) EXPECT_NEAR(p.energy / (p.n + 0.5), 1.0, 1e-4);
  // three-point Laplacian on a finer grid reaches the same tolerance
  const auto f = solve_eigenstates(PotentialSpec(Harmonic{1.0}), SpatialGrid(2048, -12, 12), 10,
                                   EigenMethod::finite_difference);
  for (const auto& p : f) EXPECT_NEAR(p.energy / (p.n + 0.5), 1.0, 1e-4);
}

TEST(Quantum, BoxSpectrum) {
  const double L = 1.5, m = 2.0;
  for (auto method : {EigenMethod::spectral, EigenMethod::finite_difference}) {
    const SpatialGrid g(method == EigenMethod::spectral ? 512 : 1024, 0.0, L, Boundary::dirichlet);
    const auto e = solve_eigenstates(PotentialSpec(Box{L}, m), g, 5, method);
    for (const auto& p : e) {
      const double n = p.n + 1.0;
      EXPECT_NEAR(p.energy / (n * n * pi * pi / (2 * m * L * L)), 1.0, 1e-4);
    }
  }
}

TEST(Quantum, OrthonormalAndResidual) {
  const PotentialSpec spec(Quartic{0.3, 0.1});
  const SpatialGrid g(512, -10, 10);
  const auto e = solve_eigenstates(spec, g, 4);
  const auto V = sample_on_grid(g, [&](double q) { return eval_U0(spec, q); });
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_LT(eigen_residual(e[i].state, V, e[i].energy), 1e-6 * std::abs(e[i].energy));
    for (std::size_t j = 0; j < e.size(); ++j)
      EXPECT_NEAR(std::abs(overlap(e[i].state, e[j].state)), i == j ? 1.0 : 0.0, 1e-10);
    EXPECT_NEAR(energy_expectation(e[i].state, V), e[i].energy, 1e-9);
  }
}

TEST(Quantum, ResolutionAndExtentErrors) {
  EXPECT_THROW(solve_eigenstates(PotentialSpec(Harmonic{1.0}), SpatialGrid(256, -200, 200), 3), ResolutionError);
  EXPECT_THROW(solve_eigenstates(PotentialSpec(Harmonic{1.0}), SpatialGrid(256, -2, 2), 3), ExtentError);
  EXPECT_THROW(solve_eigenstates(PotentialSpec(Box{1.0}), SpatialGrid(256, -1, 2), 0), std::invalid_argument);
}

TEST(Quantum, ScaledEigenstate) {
  const PotentialSpec spec(Harmonic{1.0});
  // source grid finer than the target: cubic interpolation error enters the residual as dq^4
  const SpatialGrid src(1024, -9, 9), g(1024, -16, 16);
  const auto e = solve_eigenstates(spec, src, 2);
  const auto same = scaled_eigenstate(e[0], 1.0, 0.0);
  EXPECT_NEAR(fidelity(same, e[0].state), 1.0, 1e-14);
  const auto wide = scaled_eigenstate(e[0], 2.0, 0.0, g);
  EXPECT_NEAR(moment2(wide) / moment2(e[0].state), 4.0, 1e-6);
  for (double gamma : {0.5, 1.5, 2.0}) {
    const auto s = scaled_eigenstate(e[2], gamma, 0.7, g);
    const auto Vs = sample_on_grid(g, [&](double q) { return eval_U0(scaled_spec(spec, gamma, 0.7), q); });
    const double Es = e[2].energy / (gamma * gamma);
    EXPECT_LT(eigen_residual(s, Vs, Es), 1e-5 * Es);
  }
  EXPECT_THROW(scaled_eigenstate(e[0], 4.0, 0.0), ExtentError);
}

TEST(Quantum, RediagonalizationScalingLaw) {
  // one physical grid for every gamma, so the discrete problems are not similar copies of each other
  for (const auto& spec : {PotentialSpec(Harmonic{1.0}), PotentialSpec(Quartic{0.5, 0.05}),
                           PotentialSpec(GaussianWell{12.0, 0.3})}) {
    const bool wide = std::holds_alternative<GaussianWell>(spec.shape);
    const SpatialGrid g(wide ? 2048 : 1024, wide ? -24.0 : -20.0, wide ? 24.0 : 20.0);
    const auto base = solve_eigenstates(spec, g, 5);
    for (double gamma : {0.5, 2.0}) {
      const auto sc = solve_eigenstates(scaled_spec(spec, gamma), g, 5);
      for (int n = 0; n <= 5; ++n)
        EXPECT_NEAR(sc[n].energy / (base[n].energy / (gamma * gamma)), 1.0, 1e-4) << shape_name(spec) << " " << n;
    }
  }
}

TEST(Quantum, StationaryGroundState) {
  const PotentialSpec spec(Harmonic{1.0});
  const SpatialGrid g(512, -10, 10);
  const auto e = solve_eigenstates(spec, g, 0);
  const PointPotential U = [&](double q, double) { return eval_U0(spec, q); };
  const auto V = sample_on_grid(g, [&](double q) { return eval_U0(spec, q); });
  double worst_energy = 0.0;
  PropagationOptions opt;
  opt.observe_every = 100;
  opt.observer = [&](double, const WaveFunction& w) {
    worst_energy = std::max(worst_energy, std::abs(energy_expectation(w, V) / e[0].energy - 1.0));
  };
  const auto out = split_step_propagate(e[0].state, U, 0.0, 3.7, 1e-3, opt);
  EXPECT_NEAR(fidelity(out, e[0].state), 1.0, 1e-8);
  EXPECT_NEAR(out.norm(), 1.0, 1e-10);
  EXPECT_LT(worst_energy, 1e-8);
  // phase e^{-i E t}
  const cplx ov = overlap(e[0].state, out);
  EXPECT_NEAR(std::arg(ov * std::polar(1.0, e[0].energy * 3.7)), 0.0, 1e-6);
}

TEST(Quantum, SecondOrderInTimeStep) {
  const PotentialSpec spec(Harmonic{1.0});
  const SpatialGrid g(512, -12, 12);
  const auto e = solve_eigenstates(spec, g, 0);
  const PointPotential U = [](double q, double t) {
    const double w2 = 1.0 + 0.5 * std::sin(2.0 * t);
    return 0.5 * w2 * (q - 0.3 * std::sin(t)) * (q - 0.3 * std::sin(t));
  };
  const auto run = [&](double dt) { return split_step_propagate(e[0].state, U, 0.0, 2.0, dt); };
  const auto ref = run(6.25e-5);
  const auto a = run(2e-3), b = run(1e-3);
  double ea = 0.0, eb = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    ea = std::max(ea, std::abs(a.psi[k] - ref.psi[k]));
    eb = std::max(eb, std::abs(b.psi[k] - ref.psi[k]));
  }
  EXPECT_NEAR(ea / eb, 4.0, 0.3);
}

TEST(Quantum, FreeGaussianSpreading) {
  const SpatialGrid g(1024, -40, 40);
  const double sigma = 1.0, m = 1.0, t = 3.0;
  WaveFunction w = gaussian(g, 0.0, sigma);
  const PointPotential zero = [](double, double) { return 0.0; };
  const auto out = split_step_propagate(w, zero, 0.0, t, 1e-2);
  const double expect = sigma * sigma * (1.0 + std::pow(t / (2 * m * sigma * sigma), 2));
  EXPECT_NEAR(moment2(out), expect, 1e-9);
}

TEST(Quantum, DirichletPropagationKeepsBoxStates) {
  const SpatialGrid g(256, 0.0, 1.0, Boundary::dirichlet);
  const auto e = solve_eigenstates(PotentialSpec(Box{1.0}), g, 1);
  const PointPotential zero = [](double, double) { return 0.0; };
  const auto out = split_step_propagate(e[1].state, zero, 0.0, 0.2, 1e-4);
  EXPECT_NEAR(fidelity(out, e[1].state), 1.0, 1e-12);
  EXPECT_NEAR(std::arg(overlap(e[1].state, out) * std::polar(1.0, e[1].energy * 0.2)), 0.0, 1e-9);
}

TEST(Quantum, LeakageDetected) {
  const SpatialGrid g(256, -10, 10);
  const auto w = gaussian(g, 0.0, 0.5, 6.0);
  const PointPotential zero = [](double, double) { return 0.0; };
  EXPECT_THROW(split_step_propagate(w, zero, 0.0, 4.0, 5e-4), LeakageError);
}

TEST(Quantum, TimeStepGuard) {
  const SpatialGrid g(256, -10, 10);
  const auto w = gaussian(g, 0.0, 1.0);
  const PointPotential big = [](double q, double) { return 50.0 * q * q; };
  EXPECT_THROW(split_step_propagate(w, big, 0.0, 1.0, 0.1), std::invalid_argument);
}

TEST(Quantum, CdUnitary) {
  const SpatialGrid g(512, -15, 15);
  const auto w = gaussian(g, 0.4, 1.2, 0.3);
  EXPECT_NEAR(fidelity(cd_unitary_apply(w, DriveSchedule::constant(1.0), 0.5), w), 1.0, 1e-14);
  const auto s = make_quintic_schedule(2.0, 1.5, 1.0);
  const auto u = cd_unitary_apply(w, s, 0.4);
  const auto r1 = w.density(), r2 = u.density();
  for (std::size_t k = 0; k < r1.size(); ++k) EXPECT_NEAR(r1[k], r2[k], 1e-15);
  EXPECT_LT(fidelity(u, w), 0.99);
  const auto back = cd_unitary_apply(u, s, 0.4, true);
  for (std::size_t k = 0; k < r1.size(); ++k) EXPECT_NEAR(std::abs(back.psi[k] - w.psi[k]), 0.0, 1e-14);
  // endpoints of a quintic protocol: only the global transport phase remains
  EXPECT_NEAR(fidelity(cd_unitary_apply(w, s, 1.0), w), 1.0, 1e-13);
}

TEST(Quantum, TargetState) {
  const PotentialSpec spec(Harmonic{1.0});
  const SpatialGrid g(1024, -16, 16);
  const auto e = solve_eigenstates(spec, g, 1);
  const auto s = make_quintic_schedule(2.0, 0.0, 2.0);
  const auto t0 = target_state(e[1], s, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(std::abs(t0.psi[k] - e[1].state.psi[k]), 0.0, 1e-13);
  const auto st = target_state(e[1], DriveSchedule::constant(3.0), 1.3);
  EXPECT_NEAR(std::arg(overlap(e[1].state, st) * std::polar(1.0, e[1].energy * 1.3)), 0.0, 1e-12);
  const auto mid = target_state(e[1], s, 1.1);
  const auto ref = scaled_eigenstate(e[1], s.local(1.1).gamma, 0.0);
  const auto r1 = mid.density(), r2 = ref.density();
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(r1[k], r2[k], 1e-14);
}

TEST(Quantum, FidelityOracles) {
  const SpatialGrid g(1024, -20, 20), h(1024, -20, 21);
  const auto a = gaussian(g, 0.0, 1.0), b = gaussian(g, 1.0, 1.0);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-14);
  // equal widths sigma: |<a|b>|^2 = exp(-d^2 / (4 sigma^2))
  EXPECT_NEAR(fidelity(a, b), std::exp(-0.25), 1e-12);
  const auto e = solve_eigenstates(PotentialSpec(Harmonic{1.0}), g, 1);
  EXPECT_NEAR(fidelity(e[0].state, e[1].state), 0.0, 1e-8);
  EXPECT_THROW(fidelity(a, gaussian(h, 0.0, 1.0)), GridMismatch);
}

TEST(Quantum, ShortcutExpansionHarmonic) {
  const auto s = make_quintic_schedule(2.0, 0.0, pi);
  const auto r = shortcut_run(PotentialSpec(Harmonic{1.0}), s, 0);
  EXPECT_GE(r.F_end, 0.999);
  EXPECT_GE(r.min_F_vs_Utarget, 0.999);
  EXPECT_GT(r.F_end - r.F_control_end, 0.05);
  EXPECT_LT(r.max_norm_error, 1e-10);
  EXPECT_FALSE(r.snapshots.empty());
  // mid-protocol the state is not the instantaneous eigenstate
  double dip = 1.0;
  for (const auto& smp : r.cd) dip = std::min(dip, smp.F_vs_target);
  EXPECT_LT(dip, 0.99);
}

TEST(Quantum, ShortcutAdiabaticLimit) {
  QuantumRunConfig cfg;
  cfg.dt = 2.5e-3;
  cfg.grid_points = 512;
  cfg.samples = 11;
  const auto r = shortcut_run(PotentialSpec(Harmonic{1.0}), make_quintic_schedule(1.5, 0.0, 80.0), 0, cfg);
  EXPECT_GT(r.F_end, 0.9999);
  EXPECT_GT(r.F_control_end, 0.999);
}

TEST(Quantum, ShortcutTransport) {
  const double width = 1.0 / std::sqrt(2.0);
  const auto r = shortcut_run(PotentialSpec(Harmonic{1.0}), make_quintic_schedule(1.0, 10 * width, pi), 0);
  EXPECT_GE(r.F_end, 0.999);
  EXPECT_GE(r.min_F_vs_Utarget, 0.999);
}

TEST(Quantum, SelfConvergence) {
  const auto s = make_quintic_schedule(2.0, 0.0, pi);
  const PotentialSpec spec(Quartic{0.5, 0.05});
  QuantumRunConfig a;
  a.control = false;
  a.grid_points = 512;
  a.dt = 1e-3;
  QuantumRunConfig b = a;
  b.grid_points = 1024;
  b.dt = 5e-4;
  const auto ra = shortcut_run(spec, s, 2, a), rb = shortcut_run(spec, s, 2, b);
  EXPECT_LT(std::abs(ra.F_end - rb.F_end), 1e-5);
}
