#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mfd/random.hpp"
#include "mfd/tensor.hpp"

namespace testutil {

struct GradCheckResult {
  int checked = 0;
  int failed = 0;
  double worst_rel = 0;
};

// Central differences with step h on `coords` random coordinates drawn across
// `params`. A coordinate passes when the relative error is <= rel_tol, or when
// both gradients are below abs_floor in magnitude (the ratio is meaningless there).
inline GradCheckResult gradcheck(const std::function<mfd::ad::Tensor()>& loss_fn,
                                 std::vector<mfd::ad::Tensor> params, int coords,
                                 std::uint64_t seed, double rel_tol = 1e-4, double h = 1e-4,
                                 double abs_floor = 1e-9) {
  using mfd::ad::Tensor;
  for (auto& p : params) p.zero_grad();
  mfd::ad::backward(loss_fn());
  std::vector<std::vector<double>> analytic;
  for (auto& p : params) {
    if (p.has_grad()) {
      const auto g = p.grad();
      analytic.emplace_back(g.begin(), g.end());
    } else {
      analytic.emplace_back(p.numel(), 0.0);  // not reached from the loss
    }
  }
  mfd::Rng rng(seed);
  GradCheckResult r;
  for (int c = 0; c < coords; ++c) {
    const std::size_t pi = rng.below(params.size());
    const std::size_t i = rng.below(params[pi].numel());
    auto data = params[pi].mutable_data();
    const double orig = data[i];
    data[i] = orig + h;
    const double up = loss_fn().item();
    data[i] = orig - h;
    const double down = loss_fn().item();
    data[i] = orig;
    const double numeric = (up - down) / (2 * h);
    const double a = analytic[pi][i];
    const double denom = std::max(std::abs(a), std::abs(numeric));
    const double rel = denom > 0 ? std::abs(a - numeric) / denom : 0.0;
    const bool ok = rel <= rel_tol || (std::abs(a) < abs_floor && std::abs(numeric) < abs_floor);
    ++r.checked;
    if (!ok) ++r.failed;
    if (std::abs(a) >= abs_floor || std::abs(numeric) >= abs_floor) r.worst_rel = std::max(r.worst_rel, rel);
  }
  return r;
}

}  // namespace testutil
