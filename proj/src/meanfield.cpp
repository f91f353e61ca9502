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

#include "sta/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sta/errors.hpp"
#include "sta/simd/kernels.hpp"

namespace sta {

std::string_view to_string(NonlinearKind k) { return k == NonlinearKind::gpe ? "gpe" : "kolomeisky"; }

NonlinearKind nonlinear_kind_from_string(std::string_view name) {
  if (name == "gpe") return NonlinearKind::gpe;
  if (name == "kolomeisky") return NonlinearKind::kolomeisky;
  throw std::invalid_argument("unknown nonlinear model '" + std::string(name) + "' (gpe|kolomeisky)");
}

NonlinearModel NonlinearModel::gpe(double g0) {
  NonlinearModel m;
  m.kind = NonlinearKind::gpe;
  m.g0 = g0;
  m.validate();
  return m;
}

NonlinearModel NonlinearModel::kolomeisky(double particles) {
  NonlinearModel m;
  m.kind = NonlinearKind::kolomeisky;
  m.particles = particles;
  m.validate();
  return m;
}

void NonlinearModel::validate() const {
  if (!(g0 >= 0.0)) throw std::invalid_argument("g0 must be >= 0 (repulsive regime only)");
  if (!(particles > 0.0)) throw std::invalid_argument("particle number must be positive");
}

double nonlinear_coefficient(const NonlinearModel& m, double mass, double hbar) {
  if (m.kind == NonlinearKind::gpe) return m.g0;
  return std::numbers::pi * std::numbers::pi * hbar * hbar / (2.0 * mass) * m.particles * m.particles;
}

double coupling_at(const NonlinearModel& m, const DriveSchedule& s, double t, double mass, double hbar) {
  const double c = nonlinear_coefficient(m, mass, hbar);
  // the quintic term scales like a potential with alpha = 2, so it needs no tuning
  return m.kind == NonlinearKind::gpe ? c / s.local(t).gamma : c;
}

std::vector<std::pair<double, double>> coupling_schedule(const NonlinearModel& m, const DriveSchedule& s,
                                                         std::size_t samples) {
  m.validate();
  samples = std::max<std::size_t>(samples, 2);
  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = s.duration() * static_cast<double>(k) / static_cast<double>(samples - 1);
    out.emplace_back(t, m.kind == NonlinearKind::gpe ? 1.0 / s.local(t).gamma : 1.0);
  }
  return out;
}

// -- functionals -------------------------------------------------------------------------

namespace {

int power_of(const NonlinearModel& m) { return m.kind == NonlinearKind::gpe ? 1 : 2; }

void fill_nonlinear(const NonlinearModel& m, double c, const std::vector<cplx>& psi, std::vector<double>& out) {
  out.resize(psi.size());
  simd::kernels().density(psi.data(), out.data(), psi.size());
  if (m.kind == NonlinearKind::gpe) {
    for (auto& v : out) v *= c;
  } else {
    for (auto& v : out) v = c * v * v;
  }
}

double interaction_integral(const NonlinearModel& m, const WaveFunction& psi) {
  // int |psi|^{2p+2} dq
  double sum = 0.0;
  for (const auto& z : psi.psi) {
    const double r = std::norm(z);
    sum += m.kind == NonlinearKind::gpe ? r * r : r * r * r;
  }
  return sum * psi.grid.dq();
}

double kinetic_of(const WaveFunction& psi) {
  SplitStepper st(psi.grid, psi.mass, psi.hbar);
  return st.kinetic_energy(psi.psi);
}

double potential_of(const WaveFunction& psi, std::span<const double> V) {
  double sum = 0.0;
  for (std::size_t k = 0; k < V.size(); ++k) sum += V[k] * std::norm(psi.psi[k]);
  return sum * psi.grid.dq();
}

double l2_distance(const std::vector<cplx>& a, const std::vector<cplx>& b, double dq) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a[k] - b[k]);
  return std::sqrt(s * dq);
}

}  // namespace

std::vector<double> nonlinear_potential(const NonlinearModel& m, double c, const WaveFunction& psi) {
  std::vector<double> out;
  fill_nonlinear(m, c, psi.psi, out);
  return out;
}

double energy_functional(const NonlinearModel& m, double c, const WaveFunction& psi, std::span<const double> V) {
  // E_int = c/(p+1) int |psi|^{2p+2}
  return kinetic_of(psi) + potential_of(psi, V) + c / (power_of(m) + 1) * interaction_integral(m, psi);
}

double chemical_potential(const NonlinearModel& m, double c, const WaveFunction& psi, std::span<const double> V) {
  return kinetic_of(psi) + potential_of(psi, V) + c * interaction_integral(m, psi);
}

double stationary_residual(const NonlinearModel& m, const StationaryState& st, const PotentialSpec& spec) {
  const double c = nonlinear_coefficient(m, st.psi.mass, st.psi.hbar);
  auto V = sample_on_grid(st.psi.grid, [&](double q) { return eval_U0(spec, q); });
  const auto N = nonlinear_potential(m, c, st.psi);
  for (std::size_t k = 0; k < V.size(); ++k) V[k] += N[k];
  return eigen_residual(st.psi, V, st.mu);
}

double virial_residual(const NonlinearModel& m, const StationaryState& st, const PotentialSpec& spec) {
  const double c = nonlinear_coefficient(m, st.psi.mass, st.psi.hbar);
  const auto q = st.psi.grid.points();
  double qdu = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) qdu += q[k] * eval_dU0(spec, q[k]) * std::norm(st.psi.psi[k]);
  qdu *= st.psi.grid.dq();
  // under psi -> l^{1/2} psi(l q): T ~ l^2, E_int ~ l^p, so stationarity gives 2T - <q U'> + p E_int = 0
  const double p = power_of(m);
  const double e_int = c / (p + 1) * interaction_integral(m, st.psi);
  return std::abs(2.0 * kinetic_of(st.psi) - qdu + p * e_int) / std::abs(st.mu);
}

std::vector<double> thomas_fermi_density(const PotentialSpec& spec, double g, const SpatialGrid& grid) {
  if (!(g > 0.0)) throw std::invalid_argument("Thomas-Fermi profile needs g > 0");
  const auto U = sample_on_grid(grid, [&](double q) { return eval_U0(spec, q); });
  const auto mass_of = [&](double mu) {
    double s = 0.0;
    for (double u : U) s += std::max(mu - u, 0.0);
    return s * grid.dq() / g;
  };
  double lo = *std::min_element(U.begin(), U.end()), hi = lo + 1.0;
  while (mass_of(hi) < 1.0) hi = lo + 2.0 * (hi - lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::abs(hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_of(mid) < 1.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  std::vector<double> n(U.size());
  for (std::size_t k = 0; k < U.size(); ++k) n[k] = std::max(mu - U[k], 0.0) / g;
  const double total = mass_of(mu);
  for (auto& v : n) v /= total;
  return n;
}

double relative_l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += b[k] * b[k];
  }
  return std::sqrt(num / den);
}

// -- ground state ----------------------------------------------------------------------

namespace {

struct Relaxed {
  std::vector<cplx> psi;
  std::size_t iterations = 0;
};

// Imaginary-time relaxation at fixed step h. The nonlinear potential is frozen over each step so the
// map's fixed point is the ground state of a symmetric splitting, biased by O(h^2) only.
Relaxed relax(const NonlinearModel& m, double c, const std::vector<double>& U, WaveFunction psi, double h,
              const GroundStateOptions& opt, std::size_t budget) {
  SplitStepper st(psi.grid, psi.mass, psi.hbar);
  std::vector<double> N, V(U.size());
  const std::size_t check = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(0.25 / h)));
  double mu_prev = std::numeric_limits<double>::quiet_NaN();
  std::vector<cplx> prev = psi.psi;
  for (std::size_t it = 1; it <= budget; ++it) {
    fill_nonlinear(m, c, psi.psi, N);
    for (std::size_t k = 0; k < V.size(); ++k) V[k] = U[k] + N[k];
    st.potential_decay(psi.psi, V, 0.5 * h);
    st.kinetic_decay(psi.psi, h);
    st.potential_decay(psi.psi, V, 0.5 * h);
    psi.normalize();
    if (it % check == 0) {
      const double mu = chemical_potential(m, c, psi, U);
      const double dpsi = l2_distance(psi.psi, prev, psi.grid.dq());
      if (!std::isfinite(mu)) throw ConvergenceError("imaginary-time relaxation diverged");
      if (std::abs(mu - mu_prev) <= opt.mu_tolerance * std::abs(mu) && dpsi < 1e-10) return {psi.psi, it};
      mu_prev = mu;
      prev = psi.psi;
    }
  }
  throw ConvergenceError("ground state did not converge in " + std::to_string(budget) +
                         " imaginary-time steps (dtau = " + std::to_string(h) + ")");
}

}  // namespace

StationaryState ground_state(const NonlinearModel& model, const PotentialSpec& spec, const SpatialGrid& grid,
                             const GroundStateOptions& opt) {
  model.validate();
  if (!(opt.dtau > 0.0)) throw std::invalid_argument("dtau must be positive");
  const double c = nonlinear_coefficient(model, spec.mass, opt.hbar);
  const auto U = sample_on_grid(grid, [&](double q) { return eval_U0(spec, q); });

  // the linear ground state is the starting guess; it also rejects non-confining traps
  WaveFunction psi = solve_eigenstates(spec, grid, 0, EigenMethod::spectral, opt.hbar).front().state;

  const double h0 = opt.dtau, h1 = opt.dtau / 5.0, h2 = opt.dtau / 10.0;
  std::size_t budget = opt.max_iterations;
  auto r = relax(model, c, U, psi, h0, opt, budget);
  budget -= std::min(budget, r.iterations);
  psi.psi = r.psi;
  const auto a = relax(model, c, U, psi, h1, opt, budget);
  budget -= std::min(budget, a.iterations);
  psi.psi = a.psi;
  const auto b = relax(model, c, U, psi, h2, opt, budget);

  // psi(h) = psi* + c2 h^2 + O(h^4)
  for (std::size_t k = 0; k < psi.psi.size(); ++k) psi.psi[k] = (4.0 * b.psi[k] - a.psi[k]) / 3.0;
  psi.normalize();
  StationaryState out{psi, 0.0};
  out.mu = chemical_potential(model, c, out.psi, U);
  return out;
}

// -- driven runs -------------------------------------------------------------------------

SpatialGrid meanfield_grid(const NonlinearModel& model, const PotentialSpec& spec, const DriveSchedule& s,
                           std::size_t points, const GroundStateOptions& opt) {
  SpatialGrid g = auto_grid(spec, s, 0, points);
  // interactions broaden the state; widen until the ground state is negligible at the edges
  for (int iter = 0;; ++iter) {
    const auto st = ground_state(model, spec, g, opt);
    double peak = 0.0;
    for (const auto& z : st.psi.psi) peak = std::max(peak, std::abs(z));
    const auto& v = st.psi.psi;
    if (std::max(std::abs(v.front()), std::abs(v.back())) < 1e-12 * peak) {
      std::size_t lo = 0, hi = v.size() - 1;
      while (lo < hi && std::abs(v[lo]) <= 1e-10 * peak) ++lo;
      while (hi > lo && std::abs(v[hi]) <= 1e-10 * peak) --hi;
      const double xl = g.q(lo), xh = g.q(hi);
      double qa = std::numeric_limits<double>::infinity(), qb = -qa;
      for (int k = 0; k <= 200; ++k) {
        const auto x = s.local(s.duration() * k / 200.0);
        qa = std::min(qa, x.gamma * xl + x.f);
        qb = std::max(qb, x.gamma * xh + x.f);
      }
      const double pad = 0.25 * (qb - qa);
      return SpatialGrid(points, qa - pad, qb + pad);
    }
    if (iter == 8) throw ExtentError("mean-field ground state did not fit on the automatic grid");
    const double mid = 0.5 * (g.q_min() + g.q_max()), half = 0.75 * g.length();
    g = SpatialGrid(points, mid - half, mid + half);
  }
}

MeanFieldReport cd_propagate(const StationaryState& state, const NonlinearModel& model, const DrivenPotential& dp,
                             const MeanFieldRunConfig& cfg) {
  model.validate();
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto& s = dp.schedule;
  const auto& spec = dp.spec;
  const SpatialGrid& grid = state.psi.grid;
  const double mass = state.psi.mass, hbar = state.psi.hbar;
  const double c0 = nonlinear_coefficient(model, mass, hbar);
  const double T = s.duration();
  const EigenPair psi0{0, state.mu, state.psi};

  MeanFieldReport rep;
  rep.grid = grid;
  rep.mu = state.mu;

  const auto coupling = [&](double t) {
    return cfg.freeze_coupling ? c0 : coupling_at(model, s, t, mass, hbar);
  };
  const auto q = grid.points();
  std::vector<double> U(q.size()), N, V(q.size());
  const auto trap = [&](double t) {
    const auto x = s.local(t);
    for (std::size_t k = 0; k < q.size(); ++k) U[k] = local_cd_U(spec, x, q[k]);
  };
  const auto total = [&](const WaveFunction& psi, double t) {
    fill_nonlinear(model, coupling(t), psi.psi, N);
    for (std::size_t k = 0; k < V.size(); ++k) V[k] = U[k] + N[k];
  };

  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / cfg.dt - 1e-9)));
  const double h = T > 0.0 ? T / static_cast<double>(steps) : 0.0;
  const std::size_t every = std::max<std::size_t>(1, steps / std::max<std::size_t>(1, cfg.samples - 1));
  const std::size_t snap_every = std::max<std::size_t>(1, steps / std::max<std::size_t>(1, cfg.snapshots));
  const bool periodic = grid.boundary() == Boundary::periodic;

  WaveFunction psi = state.psi;
  SplitStepper st(grid, mass, hbar);

  const auto observe = [&](double t, bool snap) {
    const auto target = target_state(psi0, s, t, grid);
    const auto rho = psi.density();
    const auto rho_t = target.density();
    const double g = coupling(t);
    const double energy = st.kinetic_energy(psi.psi) + potential_of(psi, U) +
                          g / (power_of(model) + 1) * interaction_integral(model, psi);
    MeanFieldSample smp{t, relative_l2(rho, rho_t), fidelity(psi, cd_unitary_apply(target, s, t)), psi.norm(), g,
                        energy};
    rep.samples.push_back(smp);
    rep.max_R = std::max(rep.max_R, smp.R);
    rep.min_F = std::min(rep.min_F, smp.F);
    rep.max_norm_error = std::max(rep.max_norm_error, std::abs(smp.norm - 1.0));
    if (snap) rep.snapshots.push_back({t, rho});
  };

  trap(0.0);
  total(psi, 0.0);
  if (T > 0.0) {
    double peak = 0.0, vmax = 0.0;
    for (const auto& z : psi.psi) peak = std::max(peak, std::abs(z));
    for (std::size_t k = 0; k < q.size(); ++k)
      if (std::abs(psi.psi[k]) > 1e-8 * peak) vmax = std::max(vmax, std::abs(V[k]));
    const double emax = vmax + st.populated_kinetic_max(psi.psi);
    if (h * emax / hbar >= 0.1)
      throw std::invalid_argument("time step too large: dt * E_max / hbar = " + std::to_string(h * emax / hbar) +
                                  " (need < 0.1)");
  }
  observe(0.0, true);

  for (std::size_t i = 0; i < steps && T > 0.0; ++i) {
    const double ta = static_cast<double>(i) * h;
    const double tb = i + 1 == steps ? T : static_cast<double>(i + 1) * h;
    if (i > 0) {
      trap(ta);
      total(psi, ta);
    }
    st.potential(psi.psi, V, 0.5 * h);
    st.kinetic(psi.psi, h);
    trap(tb);
    total(psi, tb);
    st.potential(psi.psi, V, 0.5 * h);
    if (periodic && ((i + 1) % 32 == 0 || i + 1 == steps)) {
      double peak = 0.0;
      for (const auto& z : psi.psi) peak = std::max(peak, std::abs(z));
      const double edge = std::max(std::abs(psi.psi.front()), std::abs(psi.psi.back()));
      if (edge > 1e-6 * peak)
        throw LeakageError("amplitude reached the grid edge at t = " + std::to_string(tb));
    }
    if (i + 1 == steps || (i + 1) % every == 0) observe(tb, i + 1 == steps || (i + 1) % snap_every == 0);
  }
  rep.F_end = fidelity(psi, target_state(psi0, s, T, grid));
  return rep;
}

MeanFieldReport meanfield_run(const NonlinearModel& model, const DrivenPotential& dp, const MeanFieldRunConfig& cfg) {
  const SpatialGrid grid = cfg.extent ? SpatialGrid(cfg.grid_points, cfg.extent->first, cfg.extent->second)
                                      : meanfield_grid(model, dp.spec, dp.schedule, cfg.grid_points, cfg.ground);
  const auto st = ground_state(model, dp.spec, grid, cfg.ground);
  return cd_propagate(st, model, dp, cfg);
}

}  // namespace sta
