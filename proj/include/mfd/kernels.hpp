#pragma once

#include <cstddef>

#include "mfd/exec.hpp"

namespace mfd::kernels {

// Row-major GEMM: C[m,n] (+)= op(A) * op(B), where op(A) is [m,k] and op(B) is [k,n].
// A is stored [k,m] when trans_a, B is stored [n,k] when trans_b. Every output
// element is reduced over k in ascending order, so the serial and parallel
// paths agree bitwise.
struct GemmArgs {
  bool trans_a = false;
  bool trans_b = false;
  std::size_t m = 0, n = 0, k = 0;
  const double* a = nullptr;
  const double* b = nullptr;
  double* c = nullptr;
  bool accumulate = false;
};

namespace serial {
void gemm(const GemmArgs& args);
}

namespace parallel {
void gemm(const GemmArgs& args);
}

// Picks the parallel kernel above a work threshold.
void gemm(const GemmArgs& args);
void gemm(const GemmArgs& args, ExecPolicy policy);

inline constexpr std::size_t kParallelGemmThreshold = 1u << 15;

}  // namespace mfd::kernels
