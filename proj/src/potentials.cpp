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

#include "sta/potentials.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "sta/errors.hpp"

namespace sta {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double numeric_derivative(const std::function<double(double)>& U, double q) {
  const double h = 1e-5 * (1.0 + std::abs(q));
  return (U(q + h) - U(q - h)) / (2.0 * h);
}

}  // namespace

PotentialSpec::PotentialSpec(Shape s, double m) : shape(std::move(s)), mass(m) {
  require(mass > 0.0 && std::isfinite(mass), "mass must be positive");
  std::visit(overloaded{
                 [](const PowerLaw& v) {
                   require(v.A > 0.0, "power law needs A > 0");
                   require(v.b >= 2 && v.b % 2 == 0, "power law needs an even exponent b >= 2");
                 },
                 [](const Harmonic& v) { require(v.omega0 > 0.0, "harmonic needs omega0 > 0"); },
                 [](const Quartic& v) {
                   require(v.alpha4 >= 0.0 && (v.alpha4 > 0.0 || v.alpha2 > 0.0),
                           "quartic must be bounded below");
                 },
                 [](const Morse& v) { require(v.Um > 0.0 && v.beta > 0.0, "morse needs Um, beta > 0"); },
                 [](const PoschlTeller& v) {
                   require(v.lambda > 1.0 && v.alpha > 0.0, "poschl-teller needs lambda > 1, alpha > 0");
                 },
                 [](const GaussianWell& v) { require(v.A > 0.0 && v.alpha > 0.0, "gaussian well needs A, alpha > 0"); },
                 [](const OpticalLattice& v) { require(v.alpha > 0.0, "optical lattice needs alpha > 0"); },
                 [](const FiniteSquareWell& v) { require(v.half_width > 0.0, "square well needs a positive width"); },
                 [](const Box& v) { require(v.L > 0.0 && std::isfinite(v.L), "box needs finite L > 0"); },
                 [](const Series& v) {
                   require(!v.alpha.empty(), "series needs at least one coefficient");
                   if (v.alpha.size() > kMaxSeriesOrder + 1)
                     throw std::invalid_argument("series order exceeds 32");
                 },
                 [](const Custom& v) { require(static_cast<bool>(v.U), "custom potential needs a callable"); },
             },
             shape);
}

std::string shape_name(const PotentialSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerLaw&) -> std::string { return "power-law"; },
                        [](const Harmonic&) -> std::string { return "harmonic"; },
                        [](const Quartic&) -> std::string { return "quartic"; },
                        [](const Morse&) -> std::string { return "morse"; },
                        [](const PoschlTeller&) -> std::string { return "poschl-teller"; },
                        [](const GaussianWell&) -> std::string { return "gaussian-well"; },
                        [](const OpticalLattice&) -> std::string { return "optical-lattice"; },
                        [](const FiniteSquareWell&) -> std::string { return "finite-square-well"; },
                        [](const Box&) -> std::string { return "box"; },
                        [](const Series&) -> std::string { return "series"; },
                        [](const Custom& c) { return c.name; },
                    },
                    spec.shape);
}

bool is_box(const PotentialSpec& spec) { return std::holds_alternative<Box>(spec.shape); }

double potential_minimum(const PotentialSpec& spec) {
  return std::visit(
      overloaded{
          [](const Morse& v) { return -v.Um; },
          [&](const PoschlTeller& v) { return -0.5 / spec.mass * v.alpha * v.alpha * v.lambda * (v.lambda - 1.0); },
          [](const GaussianWell& v) { return -v.A; },
          [](const OpticalLattice& v) { return std::min(0.0, v.A); },
          [](const FiniteSquareWell& v) { return std::min(0.0, -v.A); },
          [](const Quartic& v) {
            if (v.alpha2 >= 0.0) return 0.0;
            return -v.alpha2 * v.alpha2 / (4.0 * v.alpha4);
          },
          [&](const auto&) {
            // Shapes without a closed form: coarse scan near the origin.
            if (std::holds_alternative<PowerLaw>(spec.shape) || std::holds_alternative<Harmonic>(spec.shape) ||
                std::holds_alternative<Box>(spec.shape))
              return 0.0;
            double lo = std::numeric_limits<double>::infinity();
            for (int i = -2000; i <= 2000; ++i) lo = std::min(lo, eval_U0(spec, 0.005 * i));
            return lo;
          },
      },
      spec.shape);
}

double eval_U0(const PotentialSpec& spec, double q) {
  if (!std::isfinite(q)) throw std::invalid_argument("position must be finite");
  return std::visit(
      overloaded{
          [&](const PowerLaw& v) { return v.A * ipow(q, v.b); },
          [&](const Harmonic& v) { return 0.5 * spec.mass * v.omega0 * v.omega0 * q * q; },
          [&](const Quartic& v) {
            const double q2 = q * q;
            return v.alpha2 * q2 + v.alpha4 * q2 * q2;
          },
          [&](const Morse& v) {
            const double e = std::exp(-v.beta * q);
            return v.Um * (e * e - 2.0 * e);
          },
          [&](const PoschlTeller& v) {
            const double c = std::cosh(v.alpha * q);
            return -0.5 / spec.mass * v.alpha * v.alpha * v.lambda * (v.lambda - 1.0) / (c * c);
          },
          [&](const GaussianWell& v) { return -v.A * std::exp(-v.alpha * v.alpha * q * q); },
          [&](const OpticalLattice& v) {
            const double s = std::sin(v.alpha * q);
            return v.A * s * s;
          },
          [&](const FiniteSquareWell& v) { return std::abs(q) < v.half_width ? -v.A : 0.0; },
          [&](const Box& v) {
            return (q >= 0.0 && q <= v.L) ? 0.0 : std::numeric_limits<double>::infinity();
          },
          [&](const Series& v) {
            double acc = 0.0;
            for (std::size_t p = v.alpha.size(); p-- > 0;) acc = acc * q + v.alpha[p];
            return acc;
          },
          [&](const Custom& v) { return v.U(q); },
      },
      spec.shape);
}

double eval_dU0(const PotentialSpec& spec, double q) {
  return std::visit(
      overloaded{
          [&](const PowerLaw& v) { return v.A * v.b * ipow(q, v.b - 1); },
          [&](const Harmonic& v) { return spec.mass * v.omega0 * v.omega0 * q; },
          [&](const Quartic& v) { return 2.0 * v.alpha2 * q + 4.0 * v.alpha4 * q * q * q; },
          [&](const Morse& v) {
            const double e = std::exp(-v.beta * q);
            return 2.0 * v.Um * v.beta * (e - e * e);
          },
          [&](const PoschlTeller& v) {
            const double a = v.alpha * q;
            const double c = std::cosh(a);
            return 1.0 / spec.mass * v.alpha * v.alpha * v.alpha * v.lambda * (v.lambda - 1.0) *
                   std::sinh(a) / (c * c * c);
          },
          [&](const GaussianWell& v) {
            const double a2 = v.alpha * v.alpha;
            return 2.0 * v.A * a2 * q * std::exp(-a2 * q * q);
          },
          [&](const OpticalLattice& v) { return v.A * v.alpha * std::sin(2.0 * v.alpha * q); },
          [&](const FiniteSquareWell&) { return 0.0; },
          [&](const Box&) { return 0.0; },
          [&](const Series& v) {
            double acc = 0.0;
            for (std::size_t p = v.alpha.size(); p-- > 1;) acc = acc * q + static_cast<double>(p) * v.alpha[p];
            return acc;
          },
          [&](const Custom& v) { return v.dU ? v.dU(q) : numeric_derivative(v.U, q); },
      },
      spec.shape);
}

double driven_U(const PotentialSpec& spec, const ScheduleSample& x, double q) {
  return eval_U0(spec, (q - x.f) / x.gamma) / (x.gamma * x.gamma);
}

double local_cd_U(const PotentialSpec& spec, const ScheduleSample& x, double q) {
  const double d = q - x.f;
  return driven_U(spec, x, q) - 0.5 * spec.mass * x.ddgamma / x.gamma * d * d - spec.mass * x.ddf * q;
}

double local_cd_dU(const PotentialSpec& spec, const ScheduleSample& x, double q) {
  const double g = x.gamma;
  return eval_dU0(spec, (q - x.f) / g) / (g * g * g) - spec.mass * x.ddgamma / g * (q - x.f) -
         spec.mass * x.ddf;
}

PotentialSpec scaled_spec(const PotentialSpec& spec, double gamma, double f) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double g2 = gamma * gamma;
  return PotentialSpec(Custom{[spec, gamma, f, g2](double q) { return eval_U0(spec, (q - f) / gamma) / g2; },
                              [spec, gamma, f, g2](double q) { return eval_dU0(spec, (q - f) / gamma) / (g2 * gamma); },
                              shape_name(spec) + "-scaled"},
                       spec.mass);
}

double eval_driven_U(const DrivenPotential& dp, double q, double t) {
  return driven_U(dp.spec, dp.schedule.local(t), q);
}

double eval_driven_dU(const DrivenPotential& dp, double q, double t) {
  const ScheduleSample x = dp.schedule.local(t);
  return eval_dU0(dp.spec, (q - x.f) / x.gamma) / (x.gamma * x.gamma * x.gamma);
}

double eval_local_cd_U(const DrivenPotential& dp, double q, double t) {
  return local_cd_U(dp.spec, dp.schedule.local(t), q);
}

double eval_local_cd_dU(const DrivenPotential& dp, double q, double t) {
  return local_cd_dU(dp.spec, dp.schedule.local(t), q);
}

SeriesCoefficients series_coefficients_at(std::span<const double> alpha0, const ScheduleSample& x,
                                          double mass) {
  if (alpha0.size() > kMaxSeriesOrder + 1) throw std::invalid_argument("series order exceeds 32");
  SeriesCoefficients out;
  out.t = x.t;
  out.alpha.resize(alpha0.size());
  for (std::size_t p = 0; p < alpha0.size(); ++p)
    out.alpha[p] = alpha0[p] / std::pow(x.gamma, static_cast<double>(p) + 2.0);
  out.alpha_tilde = out.alpha;
  out.alpha_tilde.resize(std::max<std::size_t>(out.alpha.size(), 3), 0.0);
  out.alpha_tilde[2] -= 0.5 * mass * x.ddgamma / x.gamma;
  out.alpha_tilde[1] -= mass * x.ddf;
  out.alpha_tilde[0] -= mass * x.ddf * x.f;
  return out;
}

std::vector<SeriesCoefficients> series_coefficient_schedule(std::span<const double> alpha0,
                                                            const DriveSchedule& s,
                                                            std::size_t samples, double mass) {
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  std::vector<SeriesCoefficients> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? s.duration()
                                      : s.duration() * static_cast<double>(i) / static_cast<double>(samples - 1);
    out.push_back(series_coefficients_at(alpha0, s.local(t), mass));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> rows;
  const std::string depth = "Addot/(2A) - (3/4)(Adot/A)^2";

  rows.push_back({"power-law", "A |q|^b", "A(t) = A(0) / gamma^(2+b)",
                  "Addot/((2+b)A) - (3+b)/(2+b)^2 (Adot/A)^2",
                  {{"A", 1.0, -6}, {"b", 4.0, 0}},
                  [](std::span<const double> p, double q) { return p[0] * std::pow(std::abs(q), p[1]); }});
  rows.push_back({"modified-poschl-teller", "-(hbar^2/2m) alpha^2 lambda(lambda-1) / cosh^2(alpha q)",
                  "alpha(t) = alpha(0) / gamma", "alphaddot/alpha - 2 (alphadot/alpha)^2",
                  {{"lambda", 2.0, 0}, {"alpha", 1.0, -1}},
                  [](std::span<const double> p, double q) {
                    const double c = std::cosh(p[1] * q);
                    return -0.5 * p[1] * p[1] * p[0] * (p[0] - 1.0) / (c * c);
                  }});
  rows.push_back({"optical-lattice", "A sin^2(alpha q)", "A(t) = A(0)/gamma^2, alpha(t) = alpha(0)/gamma",
                  depth + " = alphaddot/alpha - 2 (alphadot/alpha)^2",
                  {{"A", 1.0, -2}, {"alpha", 1.0, -1}},
                  [](std::span<const double> p, double q) {
                    const double s = std::sin(p[1] * q);
                    return p[0] * s * s;
                  }});
  rows.push_back({"gaussian-well", "-A exp(-alpha^2 q^2)", "A(t) = A(0)/gamma^2, alpha(t) = alpha(0)/gamma",
                  depth + " = alphaddot/alpha - 2 (alphadot/alpha)^2",
                  {{"A", 1.0, -2}, {"alpha", 1.0, -1}},
                  [](std::span<const double> p, double q) { return -p[0] * std::exp(-p[1] * p[1] * q * q); }});
  rows.push_back({"morse", "A^2 + B^2 exp(-2 alpha q) - 2 B (A + alpha/2) exp(-alpha q)",
                  "A(t) = A(0)/gamma, B(t) = B(0)/gamma, alpha(t) = alpha(0)/gamma",
                  "Xddot/X - 2 (Xdot/X)^2 (X = A, B, alpha)",
                  {{"A", 1.0, -1}, {"B", 1.0, -1}, {"alpha", 1.0, -1}},
                  [](std::span<const double> p, double q) {
                    const double e = std::exp(-p[2] * q);
                    return p[0] * p[0] + p[1] * p[1] * e * e - 2.0 * p[1] * (p[0] + 0.5 * p[2]) * e;
                  }});
  rows.push_back({"finite-square-well", "-A Theta(alpha - |q|)", "A(t) = A(0)/gamma^2, alpha(t) = alpha(0) gamma",
                  depth + " = -alphaddot/alpha",
                  {{"A", 1.0, -2}, {"alpha", 1.0, 1}},
                  [](std::span<const double> p, double q) { return std::abs(q) < p[1] ? -p[0] : 0.0; }});
  return rows;
}

ParameterTrack track(double x0, int k, const ScheduleSample& x) {
  ParameterTrack tr;
  const double g = x.gamma;
  tr.value = x0 * std::pow(g, k);
  if (k == 0) return tr;
  tr.d1 = k * x0 * std::pow(g, k - 1) * x.dgamma;
  tr.d2 = k * x0 * ((k - 1) * std::pow(g, k - 2) * x.dgamma * x.dgamma + std::pow(g, k - 1) * x.ddgamma);
  const double r = tr.d1 / tr.value;
  const double kk = static_cast<double>(k);
  tr.modulation = -tr.d2 / (kk * tr.value) + (kk - 1.0) / (kk * kk) * r * r;
  return tr;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> rows = build_catalog();
  return rows;
}

const CatalogEntry& catalog_entry(std::string_view name) {
  for (const auto& row : catalog())
    if (row.name == name) return row;
  throw NotInCatalog("no catalog entry named '" + std::string(name) + "'");
}

PotentialSpec catalog_spec(std::string_view name, double mass) {
  const CatalogEntry& row = catalog_entry(name);
  std::vector<double> p;
  for (const auto& par : row.parameters) p.push_back(par.value);
  auto fn = row.potential;
  Custom c;
  c.name = row.name;
  c.U = [fn, p](double q) { return fn(p, q); };
  return PotentialSpec(c, mass);
}

double catalog_driven_U(const CatalogEntry& entry, const ScheduleSample& x, double q) {
  std::vector<double> p;
  p.reserve(entry.parameters.size());
  for (const auto& par : entry.parameters) p.push_back(par.value * std::pow(x.gamma, par.exponent));
  return entry.potential(p, q - x.f);
}

std::vector<ModulationSample> catalog_modulation(std::string_view name, const DriveSchedule& s,
                                                 std::size_t samples) {
  const CatalogEntry& row = catalog_entry(name);
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  std::vector<ModulationSample> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? s.duration()
                                      : s.duration() * static_cast<double>(i) / static_cast<double>(samples - 1);
    const ScheduleSample x = s.local(t);
    ModulationSample m;
    m.t = x.t;
    m.cd_modulation = -x.ddgamma / x.gamma;
    for (const auto& par : row.parameters) m.parameters.push_back(track(par.value, par.exponent, x));
    out.push_back(std::move(m));
  }
  return out;
}

std::string catalog_json() {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : catalog()) {
    nlohmann::ordered_json j;
    j["name"] = row.name;
    j["potential"] = row.formula;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    nlohmann::ordered_json exps = nlohmann::ordered_json::object();
    for (const auto& p : row.parameters) {
      params[p.name] = p.value;
      exps[p.name] = p.exponent;
    }
    j["parameters"] = params;
    j["scaling_exponents"] = exps;
    j["time_dependence"] = row.time_dependence;
    j["cd_modulation"] = row.cd_modulation;
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace sta
