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

#include "sta/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sta {

NaturalCubicSpline::NaturalCubicSpline(double x0, double step, std::span<const double> values)
    : x0_(x0), step_(step), y_(values.begin(), values.end()), m_(values.size(), 0.0) {
  if (y_.size() < 3) throw std::invalid_argument("spline needs at least 3 samples");
  if (!(step > 0.0)) throw std::invalid_argument("spline step must be positive");

  // Thomas algorithm on the interior knots: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1]) / h^2
  const std::size_t n = y_.size();
  const std::size_t k = n - 2;
  std::vector<double> c(k, 0.0), d(k, 0.0);
  const double inv_h2 = 6.0 / (step * step);
  for (std::size_t i = 0; i < k; ++i) {
    const double rhs = inv_h2 * (y_[i] - 2.0 * y_[i + 1] + y_[i + 2]);
    const double denom = 4.0 - (i > 0 ? c[i - 1] : 0.0);
    c[i] = 1.0 / denom;
    d[i] = (rhs - (i > 0 ? d[i - 1] : 0.0)) / denom;
  }
  for (std::size_t i = k; i-- > 0;) {
    m_[i + 1] = d[i] - (i + 1 < k ? c[i] * m_[i + 2] : 0.0);
  }
}

Jet NaturalCubicSpline::eval(double x) const {
  const double u = (x - x0_) / step_;
  const auto last = static_cast<double>(y_.size() - 2);
  const double cell = std::clamp(std::floor(u), 0.0, last);
  const auto i = static_cast<std::size_t>(cell);
  const double h = step_;
  const double a = (cell + 1.0 - u);  // weight of left knot
  const double b = u - cell;          // weight of right knot
  const double y0 = y_[i], y1 = y_[i + 1], m0 = m_[i], m1 = m_[i + 1];

  Jet j;
  j.value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
  j.d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) * h / 6.0 * m0 + (3.0 * b * b - 1.0) * h / 6.0 * m1;
  j.d2 = a * m0 + b * m1;
  return j;
}

}  // namespace sta
