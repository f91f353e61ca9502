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

#include <span>
#include <vector>

namespace sta {

/// Value and first two derivatives of a smooth curve at one abscissa.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Natural cubic spline through uniformly spaced samples on [x0, x0 + (n-1) h].
/// C2 everywhere, second derivative zero at both ends.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline() = default;
  NaturalCubicSpline(double x0, double step, std::span<const double> values);

  Jet eval(double x) const;
  double operator()(double x) const { return eval(x).value; }

  double x_begin() const { return x0_; }
  double x_end() const { return x0_ + step_ * static_cast<double>(y_.size() - 1); }
  std::size_t size() const { return y_.size(); }

 private:
  double x0_ = 0.0;
  double step_ = 1.0;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace sta
