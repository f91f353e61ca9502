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

#include "sta/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>
#include <lapacke.h>

#include "sta/classical.hpp"
#include "sta/errors.hpp"
#include "sta/simd/kernels.hpp"
#include "sta/spline.hpp"

namespace sta {

using std::numbers::pi;

// -- grid ------------------------------------------------------------------------

SpatialGrid::SpatialGrid(std::size_t n, double q_min, double q_max, Boundary boundary)
    : n_(n), q_min_(q_min), q_max_(q_max), boundary_(boundary) {
  if (n < 256 || (n & (n - 1)) != 0) throw std::invalid_argument("grid size must be a power of two >= 256");
  if (!(q_max > q_min) || !std::isfinite(q_min) || !std::isfinite(q_max))
    throw std::invalid_argument("grid extent must satisfy q_min < q_max");
  dq_ = boundary == Boundary::periodic ? (q_max - q_min) / static_cast<double>(n)
                                       : (q_max - q_min) / static_cast<double>(n + 1);
}

double SpatialGrid::q(std::size_t k) const {
  return boundary_ == Boundary::periodic ? q_min_ + static_cast<double>(k) * dq_
                                         : q_min_ + static_cast<double>(k + 1) * dq_;
}

std::vector<double> SpatialGrid::points() const {
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = q(k);
  return out;
}

std::vector<double> SpatialGrid::kinetic_spectrum(double mass, double hbar) const {
  std::vector<double> K(n_);
  const double c = hbar * hbar / (2.0 * mass);
  for (std::size_t j = 0; j < n_; ++j) {
    double k;
    if (boundary_ == Boundary::periodic) {
      const double jj = j < n_ / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n_);
      k = 2.0 * pi * jj / length();
    } else {
      k = pi * static_cast<double>(j + 1) / length();
    }
    K[j] = c * k * k;
  }
  return K;
}

bool SpatialGrid::operator==(const SpatialGrid& o) const {
  return n_ == o.n_ && q_min_ == o.q_min_ && q_max_ == o.q_max_ && boundary_ == o.boundary_;
}

// -- wave function ----------------------------------------------------------------

WaveFunction::WaveFunction(SpatialGrid g, double mass_, double hbar_)
    : grid(std::move(g)), psi(grid.size()), hbar(hbar_), mass(mass_) {}

double WaveFunction::norm() const { return simd::kernels().norm2(psi.data(), psi.size()) * grid.dq(); }

void WaveFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw std::invalid_argument("cannot normalize a zero wave function");
  simd::kernels().scale(psi.data(), 1.0 / std::sqrt(n), psi.size());
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> rho(psi.size());
  simd::kernels().density(psi.data(), rho.data(), psi.size());
  return rho;
}

// -- split-step machinery -------------------------------------------------------------

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SplitStepper::Impl {
  SpatialGrid grid;
  double mass, hbar;
  std::vector<double> K;
  double norm_factor;
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<cplx> kin_phase, pot_phase;
  double kin_dt = std::numeric_limits<double>::quiet_NaN();
  std::vector<cplx> scratch;

  Impl(const SpatialGrid& g, double m, double h) : grid(g), mass(m), hbar(h), K(g.kinetic_spectrum(m, h)) {
    const int n = static_cast<int>(g.size());
    scratch.resize(g.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    // the FFTW planner is not reentrant; execution is
    const std::lock_guard<std::mutex> lock(planner_mutex());
    if (g.boundary() == Boundary::periodic) {
      fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
      bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
      norm_factor = 1.0 / n;
    } else {
      // real and imaginary parts as two interleaved real transforms
      auto* d = reinterpret_cast<double*>(scratch.data());
      const fftw_r2r_kind kind = FFTW_RODFT00;
      fwd = fftw_plan_many_r2r(1, &n, 2, d, nullptr, 2, 1, d, nullptr, 2, 1, &kind, flags);
      bwd = fwd;
      norm_factor = 1.0 / (2.0 * (n + 1));
    }
    if (fwd == nullptr) throw std::runtime_error("FFTW plan creation failed");
  }
  ~Impl() {
    const std::lock_guard<std::mutex> lock(planner_mutex());
    if (bwd != fwd && bwd != nullptr) fftw_destroy_plan(bwd);
    if (fwd != nullptr) fftw_destroy_plan(fwd);
  }

  void forward(cplx* data) {
    if (grid.boundary() == Boundary::periodic) {
      fftw_execute_dft(fwd, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
    } else {
      auto* d = reinterpret_cast<double*>(data);
      fftw_execute_r2r(fwd, d, d);
    }
  }
  void backward(cplx* data) {
    if (grid.boundary() == Boundary::periodic) {
      fftw_execute_dft(bwd, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
    } else {
      auto* d = reinterpret_cast<double*>(data);
      fftw_execute_r2r(bwd, d, d);
    }
  }
};

SplitStepper::SplitStepper(const SpatialGrid& grid, double mass, double hbar)
    : impl_(std::make_unique<Impl>(grid, mass, hbar)) {}

SplitStepper::~SplitStepper() = default;

void SplitStepper::kinetic(std::vector<cplx>& psi, double dt) {
  auto& m = *impl_;
  if (dt != m.kin_dt) {
    m.kin_phase.resize(m.K.size());
    for (std::size_t j = 0; j < m.K.size(); ++j) m.kin_phase[j] = std::polar(m.norm_factor, -m.K[j] * dt / m.hbar);
    m.kin_dt = dt;
  }
  m.forward(psi.data());
  simd::kernels().cmul(psi.data(), m.kin_phase.data(), psi.size());
  m.backward(psi.data());
}

void SplitStepper::potential(std::vector<cplx>& psi, std::span<const double> V, double dt) {
  auto& m = *impl_;
  m.pot_phase.resize(V.size());
  for (std::size_t k = 0; k < V.size(); ++k) m.pot_phase[k] = std::polar(1.0, -V[k] * dt / m.hbar);
  simd::kernels().cmul(psi.data(), m.pot_phase.data(), psi.size());
}

void SplitStepper::kinetic_decay(std::vector<cplx>& psi, double dtau) {
  auto& m = *impl_;
  std::vector<cplx> mult(m.K.size());
  for (std::size_t j = 0; j < m.K.size(); ++j) mult[j] = m.norm_factor * std::exp(-m.K[j] * dtau / m.hbar);
  m.forward(psi.data());
  simd::kernels().cmul(psi.data(), mult.data(), psi.size());
  m.backward(psi.data());
}

void SplitStepper::potential_decay(std::vector<cplx>& psi, std::span<const double> V, double dtau) {
  auto& m = *impl_;
  m.pot_phase.resize(V.size());
  for (std::size_t k = 0; k < V.size(); ++k) m.pot_phase[k] = std::exp(-V[k] * dtau / m.hbar);
  simd::kernels().cmul(psi.data(), m.pot_phase.data(), psi.size());
}

void SplitStepper::apply_kinetic(std::vector<cplx>& psi) {
  auto& m = *impl_;
  std::vector<cplx> mult(m.K.size());
  for (std::size_t j = 0; j < m.K.size(); ++j) mult[j] = m.K[j] * m.norm_factor;
  m.forward(psi.data());
  simd::kernels().cmul(psi.data(), mult.data(), psi.size());
  m.backward(psi.data());
}

double SplitStepper::kinetic_energy(const std::vector<cplx>& psi) {
  auto& m = *impl_;
  m.scratch = psi;
  m.forward(m.scratch.data());
  double s = 0.0;
  for (std::size_t j = 0; j < m.K.size(); ++j) s += m.K[j] * std::norm(m.scratch[j]);
  return s * m.norm_factor * m.grid.dq();
}

double SplitStepper::populated_kinetic_max(const std::vector<cplx>& psi, double rel) {
  auto& m = *impl_;
  m.scratch = psi;
  m.forward(m.scratch.data());
  double peak = 0.0;
  for (const auto& c : m.scratch) peak = std::max(peak, std::abs(c));
  double kmax = 0.0;
  for (std::size_t j = 0; j < m.K.size(); ++j)
    if (std::abs(m.scratch[j]) > rel * peak) kmax = std::max(kmax, m.K[j]);
  return kmax;
}

std::vector<cplx> apply_hamiltonian(const WaveFunction& psi, std::span<const double> V) {
  if (V.size() != psi.psi.size()) throw GridMismatch("potential and wave function sizes differ");
  auto out = psi.psi;
  SplitStepper(psi.grid, psi.mass, psi.hbar).apply_kinetic(out);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += V[k] * psi.psi[k];
  return out;
}

double energy_expectation(const WaveFunction& psi, std::span<const double> V) {
  const auto h = apply_hamiltonian(psi, V);
  const cplx e = simd::kernels().dot(psi.psi.data(), h.data(), h.size());
  return e.real() * psi.grid.dq() / psi.norm();
}

double eigen_residual(const WaveFunction& psi, std::span<const double> V, double E) {
  auto h = apply_hamiltonian(psi, V);
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) s += std::norm(h[k] - E * psi.psi[k]);
  return std::sqrt(s * psi.grid.dq());
}

std::vector<double> sample_on_grid(const SpatialGrid& grid, const std::function<double(double)>& U) {
  std::vector<double> V(grid.size());
  for (std::size_t k = 0; k < V.size(); ++k) {
    V[k] = U(grid.q(k));
    if (!std::isfinite(V[k]))
      throw std::invalid_argument("potential is not finite at q = " + std::to_string(grid.q(k)) +
                                  " (hard walls need a Dirichlet grid on the box)");
  }
  return V;
}

// -- eigenstates -------------------------------------------------------------------

namespace {

struct RawEigen {
  std::vector<double> energies;
  std::vector<std::vector<double>> vectors;  // unit 2-norm
};

RawEigen solve_raw(const std::vector<double>& V, const SpatialGrid& grid, int n_max, EigenMethod method,
                   double mass, double hbar) {
  const auto n = static_cast<lapack_int>(grid.size());
  const lapack_int count = n_max + 1;
  if (count > n) throw std::invalid_argument("more eigenstates requested than grid points");
  std::vector<double> w(n), z(static_cast<std::size_t>(n) * count);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  lapack_int info;
  if (method == EigenMethod::finite_difference) {
    const double c = hbar * hbar / (2.0 * mass * grid.dq() * grid.dq());
    std::vector<double> d(n), e(n);
    for (lapack_int k = 0; k < n; ++k) d[k] = 2.0 * c + V[k];
    std::fill(e.begin(), e.end(), -c);
    info = LAPACKE_dstevr(LAPACK_ROW_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count, 0.0, &found,
                          w.data(), z.data(), count, isuppz.data());
  } else {
    // kinetic matrix: circulant (periodic) or sine-grid (Dirichlet) representation of hbar^2 k^2 / 2m
    const auto K = grid.kinetic_spectrum(mass, hbar);
    std::vector<double> H(static_cast<std::size_t>(n) * n);
    if (grid.boundary() == Boundary::periodic) {
      std::vector<double> c(n, 0.0);
      for (lapack_int m = 0; m < n; ++m) {
        double s = 0.0;
        for (lapack_int j = 0; j < n; ++j) s += K[j] * std::cos(2.0 * pi * static_cast<double>((static_cast<long>(j) * m) % n) / n);
        c[m] = s / n;
      }
      for (lapack_int i = 0; i < n; ++i)
        for (lapack_int j = 0; j < n; ++j) H[static_cast<std::size_t>(i) * n + j] = c[(i - j + n) % n];
    } else {
      const lapack_int M = 2 * (n + 1);
      std::vector<double> c(M, 0.0);
      for (lapack_int m = 0; m < M; ++m) {
        double s = 0.0;
        for (lapack_int j = 0; j < n; ++j) s += K[j] * std::cos(pi * static_cast<double>(((j + 1L) * m) % M) / (n + 1));
        c[m] = s;
      }
      for (lapack_int i = 0; i < n; ++i)
        for (lapack_int j = 0; j < n; ++j)
          H[static_cast<std::size_t>(i) * n + j] = (c[std::abs(i - j)] - c[i + j + 2]) / (n + 1);
    }
    for (lapack_int k = 0; k < n; ++k) H[static_cast<std::size_t>(k) * n + k] += V[k];
    info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'V', 'I', 'U', n, H.data(), n, 0.0, 0.0, 1, count, 0.0, &found,
                          w.data(), z.data(), count, isuppz.data());
  }
  if (info != 0 || found != count) throw ConvergenceError("eigensolver failed (info " + std::to_string(info) + ")");
  RawEigen r;
  r.energies.assign(w.begin(), w.begin() + count);
  r.vectors.assign(count, std::vector<double>(n));
  for (lapack_int k = 0; k < n; ++k)
    for (lapack_int j = 0; j < count; ++j) r.vectors[j][k] = z[static_cast<std::size_t>(k) * count + j];
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<EigenPair> solve_eigenstates(const PotentialSpec& spec, const SpatialGrid& grid, int n_max,
                                         EigenMethod method, double hbar) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const auto V = sample_on_grid(grid, [&](double q) { return eval_U0(spec, q); });
  const auto raw = solve_raw(V, grid, n_max, method, spec.mass, hbar);
  const double vmin = *std::min_element(V.begin(), V.end());
  const double sq = 1.0 / std::sqrt(grid.dq());

  std::vector<EigenPair> out;
  out.reserve(raw.energies.size());
  for (std::size_t j = 0; j < raw.energies.size(); ++j) {
    const double E = raw.energies[j];
    const double pmax = std::sqrt(2.0 * spec.mass * std::max(E - vmin, 0.0));
    if (pmax > 0.0) {
      const double per_wavelength = 2.0 * pi * hbar / pmax / grid.dq();
      if (per_wavelength < 16.0)
        throw ResolutionError("state n = " + std::to_string(j) + " has " + std::to_string(per_wavelength) +
                              " points per wavelength (need 16); refine the grid");
    }
    const auto& v = raw.vectors[j];
    const double peak = max_abs(v);
    if (grid.boundary() == Boundary::periodic &&
        std::max(std::abs(v.front()), std::abs(v.back())) > 1e-8 * peak)
      throw ExtentError("state n = " + std::to_string(j) + " is not negligible at the grid edges; widen the extent");
    // sign: first significant lobe positive
    double sign = 1.0;
    for (double x : v)
      if (std::abs(x) > 1e-3 * peak) {
        sign = x > 0.0 ? 1.0 : -1.0;
        break;
      }
    WaveFunction wf(grid, spec.mass, hbar);
    for (std::size_t k = 0; k < v.size(); ++k) wf.psi[k] = sign * sq * v[k];
    out.push_back({static_cast<int>(j), E, std::move(wf)});
  }
  return out;
}

// -- scaled states, unitary, fidelity ---------------------------------------------------

WaveFunction scaled_eigenstate(const EigenPair& psi0, double gamma, double f, std::optional<SpatialGrid> target) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const SpatialGrid& src = psi0.state.grid;
  const SpatialGrid dst = target.value_or(src);

  std::vector<double> re(src.size());
  double peak = 0.0;
  for (std::size_t k = 0; k < re.size(); ++k) {
    re[k] = psi0.state.psi[k].real();
    peak = std::max(peak, std::abs(re[k]));
  }
  std::size_t lo = 0, hi = re.size() - 1;
  while (lo < hi && std::abs(re[lo]) <= 1e-8 * peak) ++lo;
  while (hi > lo && std::abs(re[hi]) <= 1e-8 * peak) --hi;
  const double a = gamma * src.q(lo) + f, b = gamma * src.q(hi) + f;
  if (a < dst.q_min() || b > dst.q_max())
    throw ExtentError("scaled state support [" + std::to_string(a) + ", " + std::to_string(b) +
                      "] leaves the grid [" + std::to_string(dst.q_min()) + ", " + std::to_string(dst.q_max()) + "]");

  const NaturalCubicSpline spline(src.q(0), src.dq(), re);
  WaveFunction out(dst, psi0.state.mass, psi0.state.hbar);
  const double amp = 1.0 / std::sqrt(gamma);
  for (std::size_t k = 0; k < dst.size(); ++k) {
    const double x = (dst.q(k) - f) / gamma;
    out.psi[k] = (x < spline.x_begin() || x > spline.x_end()) ? 0.0 : amp * spline(x);
  }
  out.normalize();
  return out;
}

WaveFunction target_state(const EigenPair& psi0, const DriveSchedule& s, double t, std::optional<SpatialGrid> target) {
  const auto x = s.local(t);
  WaveFunction out = scaled_eigenstate(psi0, x.gamma, x.f, std::move(target));
  const cplx phase = std::polar(1.0, -psi0.energy * s.tau(t) / psi0.state.hbar);
  for (auto& c : out.psi) c *= phase;
  return out;
}

WaveFunction cd_unitary_apply(WaveFunction psi, const DriveSchedule& s, double t, bool inverse) {
  const auto x = s.local(t);
  const double m = psi.mass / psi.hbar, sgn = inverse ? -1.0 : 1.0;
  const double global = -0.5 * m * s.transport_action(t);
  const double ratio = x.dgamma / (2.0 * x.gamma);
  std::vector<cplx> ph(psi.psi.size());
  for (std::size_t k = 0; k < ph.size(); ++k) {
    const double q = psi.grid.q(k), d = q - x.f;
    ph[k] = std::polar(1.0, sgn * (m * (x.df * q + ratio * d * d) + global));
  }
  simd::kernels().cmul(psi.psi.data(), ph.data(), ph.size());
  return psi;
}

std::complex<double> overlap(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("wave functions live on different grids");
  return simd::kernels().dot(a.psi.data(), b.psi.data(), a.psi.size()) * a.grid.dq();
}

double fidelity(const WaveFunction& a, const WaveFunction& b) { return std::norm(overlap(a, b)); }

// -- propagation ------------------------------------------------------------------------

WaveFunction split_step_propagate(WaveFunction psi, const GridPotential& U, double t0, double t1, double dt,
                                  const PropagationOptions& opt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t1 >= t0)) throw std::invalid_argument("t1 must not precede t0");
  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9)));
  const double h = (t1 - t0) / static_cast<double>(steps);
  const auto q = psi.grid.points();
  std::vector<double> V(q.size());
  SplitStepper st(psi.grid, psi.mass, psi.hbar);
  const bool periodic = psi.grid.boundary() == Boundary::periodic;

  const auto leak_check = [&](double t) {
    if (!opt.check_leakage || !periodic) return;
    double peak = 0.0;
    for (const auto& c : psi.psi) peak = std::max(peak, std::abs(c));
    const double edge = std::max(std::abs(psi.psi.front()), std::abs(psi.psi.back()));
    if (edge > opt.leakage_threshold * peak)
      throw LeakageError("amplitude reached the grid edge at t = " + std::to_string(t) + " (edge/peak = " +
                         std::to_string(edge / peak) + ")");
  };

  U(t0, q, V);
  if (opt.check_timestep && t1 > t0) {
    double peak = 0.0;
    for (const auto& c : psi.psi) peak = std::max(peak, std::abs(c));
    double vmax = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k)
      if (std::abs(psi.psi[k]) > 1e-8 * peak) vmax = std::max(vmax, std::abs(V[k]));
    const double emax = vmax + st.populated_kinetic_max(psi.psi);
    if (h * emax / psi.hbar >= 0.1)
      throw std::invalid_argument("time step too large: dt * E_max / hbar = " + std::to_string(h * emax / psi.hbar) +
                                  " (need < 0.1)");
  }
  if (opt.observer) opt.observer(t0, psi);

  for (std::size_t i = 0; i < steps; ++i) {
    const double ta = t0 + static_cast<double>(i) * h;
    const double tb = i + 1 == steps ? t1 : t0 + static_cast<double>(i + 1) * h;
    if (i > 0) U(ta, q, V);
    st.potential(psi.psi, V, 0.5 * h);
    st.kinetic(psi.psi, h);
    U(tb, q, V);
    st.potential(psi.psi, V, 0.5 * h);
    if ((i + 1) % 32 == 0 || i + 1 == steps) leak_check(tb);
    if (opt.observer && (i + 1 == steps || (opt.observe_every > 0 && (i + 1) % opt.observe_every == 0)))
      opt.observer(tb, psi);
  }
  return psi;
}

WaveFunction split_step_propagate(WaveFunction psi, const PointPotential& U, double t0, double t1, double dt,
                                  const PropagationOptions& opt) {
  const GridPotential g = [&](double t, std::span<const double> q, std::span<double> V) {
    for (std::size_t k = 0; k < q.size(); ++k) V[k] = U(q[k], t);
  };
  return split_step_propagate(std::move(psi), g, t0, t1, dt, opt);
}

// -- shortcut protocol ---------------------------------------------------------------------

SpatialGrid auto_grid(const PotentialSpec& spec, const DriveSchedule& s, int n, std::size_t points) {
  if (is_box(spec)) throw std::invalid_argument("automatic grids cover smooth traps; give the box a Dirichlet grid");
  const double c = potential_argmin(spec);
  double a = 4.0;
  std::vector<double> v;
  SpatialGrid probe(512, c - a, c + a);
  for (int iter = 0;; ++iter) {
    probe = SpatialGrid(512, c - a, c + a);
    const auto V = sample_on_grid(probe, [&](double q) { return eval_U0(spec, q); });
    v = solve_raw(V, probe, n, EigenMethod::spectral, spec.mass, 1.0).vectors.back();
    const double peak = max_abs(v);
    if (std::max(std::abs(v.front()), std::abs(v.back())) < 1e-12 * peak) break;
    if (iter == 14) throw ExtentError("eigenstate " + std::to_string(n) + " did not localize (unbound state?)");
    a *= 1.5;
  }
  const double peak = max_abs(v);
  std::size_t lo = 0, hi = v.size() - 1;
  while (lo < hi && std::abs(v[lo]) <= 1e-10 * peak) ++lo;
  while (hi > lo && std::abs(v[hi]) <= 1e-10 * peak) --hi;
  const double xl = probe.q(lo), xh = probe.q(hi);
  double qa = std::numeric_limits<double>::infinity(), qb = -qa;
  for (int k = 0; k <= 200; ++k) {
    const auto x = s.local(s.duration() * k / 200.0);
    qa = std::min(qa, x.gamma * xl + x.f);
    qb = std::max(qb, x.gamma * xh + x.f);
  }
  const double pad = 0.25 * (qb - qa);
  return SpatialGrid(points, qa - pad, qb + pad);
}

InvariantReport shortcut_run(const PotentialSpec& spec, const DriveSchedule& s, int n, const QuantumRunConfig& cfg) {
  const SpatialGrid grid = cfg.extent ? SpatialGrid(cfg.grid_points, cfg.extent->first, cfg.extent->second)
                                      : auto_grid(spec, s, n, cfg.grid_points);
  const auto eig = solve_eigenstates(spec, grid, n, cfg.method);
  const EigenPair& psi0 = eig.back();
  const double T = s.duration();

  InvariantReport rep;
  rep.grid = grid;
  rep.E_n = psi0.energy;

  const GridPotential cd = [&](double t, std::span<const double> q, std::span<double> V) {
    const auto x = s.local(t);
    for (std::size_t k = 0; k < q.size(); ++k) V[k] = local_cd_U(spec, x, q[k]);
  };
  const GridPotential bare = [&](double t, std::span<const double> q, std::span<double> V) {
    const auto x = s.local(t);
    for (std::size_t k = 0; k < q.size(); ++k) V[k] = driven_U(spec, x, q[k]);
  };

  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / cfg.dt - 1e-9)));
  const std::size_t every = std::max<std::size_t>(1, steps / std::max<std::size_t>(1, cfg.samples - 1));
  const auto q = grid.points();
  std::vector<double> V(q.size());

  const auto run = [&](const GridPotential& U, std::vector<InvariantSample>& out, bool snapshots, bool leak) {
    std::size_t count = 0;
    const std::size_t total = steps / every + 2;
    const std::size_t snap_every = std::max<std::size_t>(1, total / std::max<std::size_t>(1, cfg.snapshots));
    PropagationOptions opt;
    opt.observe_every = every;
    opt.check_leakage = leak;
    opt.observer = [&](double t, const WaveFunction& psi) {
      const auto target = target_state(psi0, s, t, grid);
      const auto ut = cd_unitary_apply(target, s, t);
      U(t, q, V);
      InvariantSample smp{t, fidelity(psi, ut), fidelity(psi, target), psi.norm(), energy_expectation(psi, V)};
      out.push_back(smp);
      if (snapshots && (count % snap_every == 0 || t == T)) rep.snapshots.push_back({t, psi.density()});
      ++count;
    };
    return split_step_propagate(psi0.state, U, 0.0, T, cfg.dt, opt);
  };

  const WaveFunction fin = run(cd, rep.cd, true, true);
  rep.F_end = fidelity(fin, target_state(psi0, s, T, grid));
  for (const auto& smp : rep.cd) {
    rep.min_F_vs_Utarget = std::min(rep.min_F_vs_Utarget, smp.F_vs_Utarget);
    rep.max_norm_error = std::max(rep.max_norm_error, std::abs(smp.norm - 1.0));
  }
  if (cfg.control) {
    // the uncorrected run may spill; its fidelity is the quantity of interest, so leakage is not fatal
    const WaveFunction ctl = run(bare, rep.control, false, false);
    rep.F_control_end = fidelity(ctl, target_state(psi0, s, T, grid));
  } else {
    rep.F_control_end = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace sta
