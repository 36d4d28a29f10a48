#pragma once

#include <string>

#include "mfd/params.hpp"

namespace mfd::nn {

// Registers `<prefix>.w` [in, out] and, when `bias`, `<prefix>.b` [out].
void add_linear(ad::ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                Rng& rng, bool bias = true);
// x W (+ b)
ad::Tensor linear(const ad::ParamStore& store, const std::string& prefix, const ad::Tensor& x);

// Row-wise dot products of equally shaped [n, d] inputs -> [n, 1].
ad::Tensor row_dot(const ad::Tensor& a, const ad::Tensor& b);

}  // namespace mfd::nn
