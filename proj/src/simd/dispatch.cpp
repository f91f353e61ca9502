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

#include <cstdlib>
#include <string_view>

#include "sta/simd/kernels.hpp"

namespace sta::simd {

namespace detail {
void cmul_scalar(cplx*, const cplx*, std::size_t);
void scale_scalar(cplx*, double, std::size_t);
double norm2_scalar(const cplx*, std::size_t);
cplx dot_scalar(const cplx*, const cplx*, std::size_t);
void density_scalar(const cplx*, double*, std::size_t);

void cmul_avx2(cplx*, const cplx*, std::size_t);
void scale_avx2(cplx*, double, std::size_t);
double norm2_avx2(const cplx*, std::size_t);
cplx dot_avx2(const cplx*, const cplx*, std::size_t);
void density_avx2(const cplx*, double*, std::size_t);
}  // namespace detail

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Kernels& kernels_for(Isa isa) {
  static const Kernels scalar{Isa::scalar, detail::cmul_scalar, detail::scale_scalar, detail::norm2_scalar,
                              detail::dot_scalar, detail::density_scalar};
  static const Kernels avx2{Isa::avx2, detail::cmul_avx2, detail::scale_avx2, detail::norm2_avx2,
                            detail::dot_avx2, detail::density_avx2};
  if (isa == Isa::avx2 && cpu_has_avx2()) return avx2;
  return scalar;
}

const Kernels& kernels() {
  static const Kernels& chosen = [] () -> const Kernels& {
    const char* env = std::getenv("STA_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return kernels_for(Isa::scalar);
    return kernels_for(Isa::avx2);
  }();
  return chosen;
}

}  // namespace sta::simd
