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

#include <complex>
#include <cstddef>
#include <string_view>

// Pointwise kernels for the split-step inner loops. Every kernel has a scalar
// reference and an AVX2/FMA variant; the variant is picked once at startup from
// the CPU and can be forced with STA_SIMD=scalar|avx2.

namespace sta::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct Kernels {
  Isa isa = Isa::scalar;
  /// a[k] *= b[k]
  void (*cmul)(cplx* a, const cplx* b, std::size_t n) = nullptr;
  /// a[k] *= s
  void (*scale)(cplx* a, double s, std::size_t n) = nullptr;
  /// sum |a[k]|^2
  double (*norm2)(const cplx* a, std::size_t n) = nullptr;
  /// sum conj(a[k]) b[k]
  cplx (*dot)(const cplx* a, const cplx* b, std::size_t n) = nullptr;
  /// rho[k] = |a[k]|^2
  void (*density)(const cplx* a, double* rho, std::size_t n) = nullptr;
};

bool cpu_has_avx2();

/// Kernel table for a given instruction set. Asking for avx2 on a CPU without it returns scalar.
const Kernels& kernels_for(Isa isa);

/// The table chosen at startup.
const Kernels& kernels();

}  // namespace sta::simd
