#include "mfd/kernels.hpp"

#include <algorithm>

namespace mfd::kernels {

namespace {

// One output row; shared by both paths so the reduction order is identical.
inline void gemm_row(const GemmArgs& g, std::size_t i) {
  double* c = g.c + i * g.n;
  if (!g.accumulate) std::fill(c, c + g.n, 0.0);
  if (!g.trans_b) {
    for (std::size_t p = 0; p < g.k; ++p) {
      const double a = g.trans_a ? g.a[p * g.m + i] : g.a[i * g.k + p];
      const double* b = g.b + p * g.n;
      for (std::size_t j = 0; j < g.n; ++j) c[j] += a * b[j];
    }
  } else {
    const double* arow = g.a + i * g.k;
    for (std::size_t j = 0; j < g.n; ++j) {
      const double* brow = g.b + j * g.k;
      double acc = c[j];
      if (!g.trans_a) {
        for (std::size_t p = 0; p < g.k; ++p) acc += arow[p] * brow[p];
      } else {
        for (std::size_t p = 0; p < g.k; ++p) acc += g.a[p * g.m + i] * brow[p];
      }
      c[j] = acc;
    }
  }
}

}  // namespace

namespace serial {
void gemm(const GemmArgs& args) {
  for (std::size_t i = 0; i < args.m; ++i) gemm_row(args, i);
}
}  // namespace serial

namespace parallel {
void gemm(const GemmArgs& args) {
  const auto m = static_cast<long>(args.m);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) gemm_row(args, static_cast<std::size_t>(i));
}
}  // namespace parallel

void gemm(const GemmArgs& args, ExecPolicy policy) {
  if (policy == ExecPolicy::parallel) parallel::gemm(args);
  else serial::gemm(args);
}

void gemm(const GemmArgs& args) {
  const std::size_t work = args.m * args.n * std::max<std::size_t>(args.k, 1);
  const bool big = work >= kParallelGemmThreshold && args.m > 1 && max_threads() > 1;
  gemm(args, big ? ExecPolicy::parallel : ExecPolicy::serial);
}

}  // namespace mfd::kernels
