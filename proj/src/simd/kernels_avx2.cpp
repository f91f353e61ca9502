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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "sta/simd/kernels.hpp"

namespace sta::simd::detail {

void cmul_scalar(cplx* a, const cplx* b, std::size_t n);
double norm2_scalar(const cplx* a, std::size_t n);
cplx dot_scalar(const cplx* a, const cplx* b, std::size_t n);
void density_scalar(const cplx* a, double* rho, std::size_t n);
void scale_scalar(cplx* a, double s, std::size_t n);

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

// two complex numbers per register, interleaved [re0, im0, re1, im1]
void cmul_avx2(cplx* a, const cplx* b, std::size_t n) {
  auto* pa = reinterpret_cast<double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    const __m256d br = _mm256_movedup_pd(vb);
    const __m256d bi = _mm256_permute_pd(vb, 0xF);
    const __m256d sw = _mm256_permute_pd(va, 0x5);
    _mm256_storeu_pd(pa + 2 * k, _mm256_fmaddsub_pd(va, br, _mm256_mul_pd(sw, bi)));
  }
  cmul_scalar(a + k, b + k, n - k);
}

void scale_avx2(cplx* a, double s, std::size_t n) {
  auto* pa = reinterpret_cast<double*>(a);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) _mm256_storeu_pd(pa + 2 * k, _mm256_mul_pd(_mm256_loadu_pd(pa + 2 * k), vs));
  scale_scalar(a + k, s, n - k);
}

double norm2_avx2(const cplx* a, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v0 = _mm256_loadu_pd(pa + 2 * k), v1 = _mm256_loadu_pd(pa + 2 * k + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  return hsum(_mm256_add_pd(acc0, acc1)) + norm2_scalar(a + k, n - k);
}

cplx dot_avx2(const cplx* a, const cplx* b, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k), vb = _mm256_loadu_pd(pb + 2 * k);
    re = _mm256_fmadd_pd(va, vb, re);                             // ar br, ai bi
    im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), im);     // ar bi, ai br
  }
  alignas(32) double t[4];
  _mm256_store_pd(t, im);
  const cplx tail = dot_scalar(a + k, b + k, n - k);
  return {hsum(re) + tail.real(), (t[0] - t[1]) + (t[2] - t[3]) + tail.imag()};
}

void density_avx2(const cplx* a, double* rho, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v0 = _mm256_loadu_pd(pa + 2 * k), v1 = _mm256_loadu_pd(pa + 2 * k + 4);
    // hadd gives [c0, c2, c1, c3]
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    _mm256_storeu_pd(rho + k, _mm256_permute4x64_pd(h, 0xD8));
  }
  density_scalar(a + k, rho + k, n - k);
}

}  // namespace sta::simd::detail
