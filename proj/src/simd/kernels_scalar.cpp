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

#include "sta/simd/kernels.hpp"

namespace sta::simd::detail {

void cmul_scalar(cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a[k].real(), ai = a[k].imag(), br = b[k].real(), bi = b[k].imag();
    a[k] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

void scale_scalar(cplx* a, double s, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) a[k] = {a[k].real() * s, a[k].imag() * s};
}

double norm2_scalar(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  return s;
}

cplx dot_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
    im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
  }
  return {re, im};
}

void density_scalar(const cplx* a, double* rho, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) rho[k] = a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
}

}  // namespace sta::simd::detail
