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
#include <random>

#include <json.hpp>

#include "sta/errors.hpp"
#include "sta/potentials.hpp"

using namespace sta;

TEST(Potentials, BaseValues) {
  EXPECT_DOUBLE_EQ(eval_U0(PotentialSpec(Harmonic{1.0}, 1.0), 1.0), 0.5);
  EXPECT_DOUBLE_EQ(eval_U0(PotentialSpec(Morse{1.0, 1.0}), 0.0), -1.0);
  EXPECT_DOUBLE_EQ(eval_U0(PotentialSpec(PowerLaw{1.0, 4}), 2.0), 16.0);
  EXPECT_TRUE(std::isinf(eval_U0(PotentialSpec(Box{2.0}), 2.5)));
  EXPECT_EQ(eval_U0(PotentialSpec(Box{2.0}), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_U0(PotentialSpec(Series{{1.0, 2.0, 3.0}}), 2.0), 17.0);
}

TEST(Potentials, InvalidParameters) {
  EXPECT_THROW(PotentialSpec(PowerLaw{1.0, 3}), std::invalid_argument);
  EXPECT_THROW(PotentialSpec(PowerLaw{-1.0, 2}), std::invalid_argument);
  EXPECT_THROW(PotentialSpec(Box{0.0}), std::invalid_argument);
  EXPECT_THROW(PotentialSpec(Series{std::vector<double>(34, 1.0)}), std::invalid_argument);
  EXPECT_THROW(PotentialSpec(Harmonic{1.0}, 0.0), std::invalid_argument);
}

TEST(Potentials, DerivativesMatchFiniteDifferences) {
  const std::vector<PotentialSpec> specs{
      PotentialSpec(PowerLaw{0.7, 4}),      PotentialSpec(Harmonic{1.3}, 2.0),
      PotentialSpec(Quartic{-0.5, 0.2}),    PotentialSpec(Morse{1.5, 0.8}),
      PotentialSpec(PoschlTeller{3.0, 0.9}), PotentialSpec(GaussianWell{4.0, 0.6}),
      PotentialSpec(OpticalLattice{2.0, 1.7}), PotentialSpec(Series{{0.1, -0.3, 0.5, 0.2, 0.1}}),
  };
  for (const auto& spec : specs) {
    for (double q : {-1.3, -0.2, 0.4, 1.1}) {
      const double h = 1e-6;
      const double fd = (eval_U0(spec, q + h) - eval_U0(spec, q - h)) / (2 * h);
      EXPECT_NEAR(eval_dU0(spec, q), fd, 1e-7 * (1.0 + std::abs(fd))) << shape_name(spec);
    }
  }
}

TEST(Potentials, DrivenAtTimeZeroIsBase) {
  const DrivenPotential dp{PotentialSpec(Morse{1.0, 1.0}), make_quintic_schedule(2.0, 1.0, 1.0)};
  for (double q : {-0.5, 0.0, 0.7, 2.0}) EXPECT_EQ(eval_driven_U(dp, q, 0.0), eval_U0(dp.spec, q));
}

TEST(Potentials, DrivenMorseScaledForm) {
  // gamma = 1/2 constant: U = (Um/gamma^2)[exp(-2 beta q/gamma) - 2 exp(-beta q/gamma)]
  const DrivenPotential dp{PotentialSpec(Morse{1.0, 1.0}), DriveSchedule::constant(1.0, 0.5)};
  for (double q : {-0.2, 0.1, 0.9}) {
    const double expect = 4.0 * (std::exp(-4.0 * q) - 2.0 * std::exp(-2.0 * q));
    EXPECT_NEAR(eval_driven_U(dp, q, 0.3), expect, 1e-13);
  }
}

TEST(Potentials, DrivenHarmonicFrequency) {
  const double w0 = 1.4, m = 0.8;
  const DrivenPotential dp{PotentialSpec(Harmonic{w0}, m), make_quintic_schedule(2.0, 0.5, 1.0)};
  const auto x = dp.schedule.local(0.6);
  const double w = w0 / (x.gamma * x.gamma);
  for (double q : {-1.0, 0.3, 2.0})
    EXPECT_NEAR(eval_driven_U(dp, q, 0.6), 0.5 * m * w * w * (q - x.f) * (q - x.f), 1e-13);
}

TEST(Potentials, LocalCdStaticEqualsDriven) {
  const DrivenPotential dp{PotentialSpec(GaussianWell{3.0, 0.5}), DriveSchedule::constant(2.0, 1.5, 0.3)};
  for (double q : {-1.0, 0.0, 1.2}) EXPECT_EQ(eval_local_cd_U(dp, q, 1.0), eval_driven_U(dp, q, 1.0));
}

TEST(Potentials, LocalCdQuarticTermByTerm) {
  const double a2 = 0.7, a4 = 0.3, m = 1.3;
  const DrivenPotential dp{PotentialSpec(Quartic{a2, a4}, m), make_quintic_schedule(1.8, 2.0, 1.5)};
  for (double t : {0.2, 0.75, 1.3}) {
    const auto x = dp.schedule.local(t);
    const double g = x.gamma;
    for (double q : {-0.4, 0.8, 2.5}) {
      const double d = q - x.f;
      const double expect = -m * x.ddf * q + (a2 / std::pow(g, 4) - m * x.ddgamma / (2 * g)) * d * d +
                            a4 / std::pow(g, 6) * d * d * d * d;
      EXPECT_NEAR(eval_local_cd_U(dp, q, t), expect, 1e-12 * (1.0 + std::abs(expect)));
    }
  }
}

TEST(Potentials, LocalCdBoxImpulseLimit) {
  const DrivenPotential dp{PotentialSpec(Box{1.0}, 2.0), make_quintic_schedule(2.0, 0.0, 1.0)};
  const auto x = dp.schedule.local(0.3);
  const double q = 0.5;
  EXPECT_NEAR(eval_local_cd_U(dp, q, 0.3), -0.5 * 2.0 * x.ddgamma / x.gamma * q * q, 1e-14);
}

TEST(Potentials, LocalCdDerivative) {
  const DrivenPotential dp{PotentialSpec(Morse{1.0, 1.0}, 0.5), make_quintic_schedule(1.5, 0.4, 1.0)};
  for (double t : {0.3, 0.6})
    for (double q : {-0.3, 0.5}) {
      const double h = 1e-6;
      const double fd = (eval_local_cd_U(dp, q + h, t) - eval_local_cd_U(dp, q - h, t)) / (2 * h);
      EXPECT_NEAR(eval_local_cd_dU(dp, q, t), fd, 1e-7);
    }
}

TEST(Potentials, SeriesIdentityScaling) {
  const std::vector<double> a0{0.3, -0.1, 0.5, 0.05, 0.02};
  for (const auto& c : series_coefficient_schedule(a0, DriveSchedule::constant(1.0), 5))
    for (std::size_t p = 0; p < a0.size(); ++p) EXPECT_EQ(c.alpha[p], a0[p]);
  const auto c = series_coefficients_at(a0, DriveSchedule::constant(1.0, 2.0).local(0.5));
  EXPECT_DOUBLE_EQ(c.alpha[0], a0[0] / 4.0);
}

TEST(Potentials, SeriesRecurrence) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> G(0.5, 2.0);
  std::vector<double> a0(33);
  for (std::size_t p = 0; p < a0.size(); ++p) a0[p] = 1.0 / (1.0 + p);
  for (int trial = 0; trial < 20; ++trial) {
    const double g = G(rng);
    const auto c = series_coefficients_at(a0, DriveSchedule::constant(1.0, g).local(0.0));
    for (std::size_t p = 1; p < a0.size(); ++p) {
      const double lhs = c.alpha[p] / a0[p];
      const double rhs = std::pow(c.alpha[p - 1] / a0[p - 1], (p + 2.0) / (p + 1.0));
      EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
    }
    EXPECT_NEAR(c.alpha[3] / a0[3], std::pow(c.alpha[2] / a0[2], 1.25), 1e-12);
  }
}

TEST(Potentials, SeriesTildeReproducesLocalCd) {
  const std::vector<double> a0{0.0, 0.0, 0.6, 0.0, 0.25};
  const PotentialSpec spec(Series{a0}, 1.7);
  const DrivenPotential dp{spec, make_quintic_schedule(1.6, -1.2, 0.9)};
  for (double t : {0.1, 0.45, 0.8}) {
    const auto x = dp.schedule.local(t);
    const auto c = series_coefficients_at(a0, x, spec.mass);
    for (double q : {-1.5, 0.0, 0.7}) {
      double sum = 0.0;
      for (std::size_t p = 0; p < c.alpha_tilde.size(); ++p) sum += c.alpha_tilde[p] * std::pow(q - x.f, p);
      EXPECT_NEAR(sum, eval_local_cd_U(dp, q, t), 1e-12 * (1.0 + std::abs(sum)));
    }
  }
}

TEST(Potentials, CatalogScaleIdentity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> G(0.5, 2.0), F(-1.0, 1.0), Q(-2.0, 2.0);
  for (const auto& row : catalog()) {
    const PotentialSpec base = catalog_spec(row.name);
    for (int trial = 0; trial < 25; ++trial) {
      ScheduleSample x;
      x.gamma = G(rng);
      x.f = F(rng);
      const double q = Q(rng);
      const double lhs = catalog_driven_U(row, x, q);
      const double rhs = eval_U0(base, (q - x.f) / x.gamma) / (x.gamma * x.gamma);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs))) << row.name;
    }
  }
}

TEST(Potentials, CatalogModulationIdentity) {
  const auto s = make_quintic_schedule(2.0, 0.0, 1.0);
  for (const auto& row : catalog()) {
    for (const auto& m : catalog_modulation(row.name, s, 41)) {
      for (std::size_t i = 0; i < m.parameters.size(); ++i) {
        if (row.parameters[i].exponent == 0) continue;
        EXPECT_NEAR(m.parameters[i].modulation, m.cd_modulation,
                    1e-8 * std::max(1.0, std::abs(m.cd_modulation)))
            << row.name << " " << row.parameters[i].name;
      }
    }
  }
}

TEST(Potentials, CatalogTimeDependence) {
  const auto s = make_quintic_schedule(2.0, 0.0, 1.0);
  const auto pw = catalog_modulation("power-law", s, 3);
  EXPECT_NEAR(pw.back().parameters[0].value, 1.0 / std::pow(2.0, 6), 1e-14);
  const auto gw = catalog_modulation("gaussian-well", s, 3);
  EXPECT_NEAR(gw.back().parameters[0].value, 0.25, 1e-14);
  EXPECT_NEAR(gw.back().parameters[1].value, 0.5, 1e-14);
  for (const auto& m : catalog_modulation("optical-lattice", DriveSchedule::constant(1.0), 5)) {
    EXPECT_EQ(m.cd_modulation, 0.0);
    EXPECT_EQ(m.parameters[0].value, 1.0);
  }
  EXPECT_THROW(catalog_entry("yukawa"), NotInCatalog);
}

TEST(Potentials, CatalogJson) {
  const auto j = nlohmann::json::parse(catalog_json());
  ASSERT_EQ(j.size(), 6u);
  for (const auto& row : j) {
    EXPECT_TRUE(row.contains("name"));
    EXPECT_TRUE(row.contains("scaling_exponents"));
    EXPECT_TRUE(row.contains("cd_modulation"));
  }
}
