#include "mfd/nn.hpp"

namespace mfd::nn {

using ad::Tensor;

void add_linear(ad::ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                Rng& rng, bool bias) {
  store.add(prefix + ".w", ad::uniform_init({in, out}, in, rng));
  if (bias) store.add(prefix + ".b", ad::uniform_init({out}, in, rng));
}

Tensor linear(const ad::ParamStore& store, const std::string& prefix, const Tensor& x) {
  Tensor y = ad::matmul(x, store.get(prefix + ".w"));
  if (store.contains(prefix + ".b")) y = ad::add_row(y, store.get(prefix + ".b"));
  return y;
}

Tensor row_dot(const Tensor& a, const Tensor& b) {
  return ad::matmul(ad::mul(a, b), Tensor::full({a.cols(), 1}, 1.0));
}

}  // namespace mfd::nn
