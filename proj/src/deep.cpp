#include "mfd/deep.hpp"

#include <cmath>

#include "mfd/error.hpp"
#include "mfd/nn.hpp"

namespace mfd {

using ad::Tensor;

AnalysisStack AnalysisStack::create(ad::ParamStore& store, std::size_t d_model, std::size_t heads,
                                    std::size_t d_ff, Rng& rng, std::string prefix) {
  if (heads == 0 || d_model % heads != 0) {
    throw ConfigError("model.heads", "d_model " + std::to_string(d_model) +
                                         " is not divisible by heads " + std::to_string(heads));
  }
  AnalysisStack s{std::move(prefix), d_model, heads, d_ff};
  const std::size_t dk = s.d_head();
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string p = s.prefix + ".mhsa.h" + std::to_string(h);
    for (const char* m : {".wq", ".wk", ".wv"}) store.add(p + m, ad::uniform_init({d_model, dk}, d_model, rng));
  }
  nn::add_linear(store, s.prefix + ".mhsa.o", d_model, d_model, rng, false);
  store.add(s.prefix + ".ln1.gain", Tensor::full({d_model}, 1.0, true));
  store.add(s.prefix + ".ln1.bias", Tensor::zeros({d_model}, true));
  nn::add_linear(store, s.prefix + ".ffn.l1", d_model, d_ff, rng);
  nn::add_linear(store, s.prefix + ".ffn.l2", d_ff, d_model, rng);
  store.add(s.prefix + ".ln2.gain", Tensor::full({d_model}, 1.0, true));
  store.add(s.prefix + ".ln2.bias", Tensor::zeros({d_model}, true));
  return s;
}

Tensor AnalysisStack::self_attention(const ad::ParamStore& store, const Tensor& e) const {
  if (e.cols() != d_model) {
    throw ShapeMismatch("refine_analysis: expected [rows, " + std::to_string(d_model) + "], got " +
                        ad::shape_string(e.shape()));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_head()));
  std::vector<Tensor> outputs;
  outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::string p = prefix + ".mhsa.h" + std::to_string(h);
    const Tensor q = ad::matmul(e, store.get(p + ".wq"));
    const Tensor k = ad::matmul(e, store.get(p + ".wk"));
    const Tensor v = ad::matmul(e, store.get(p + ".wv"));
    outputs.push_back(ad::attend(q, k, v, scale));
  }
  return nn::linear(store, prefix + ".mhsa.o", ad::concat(outputs));
}

Tensor AnalysisStack::feed_forward(const ad::ParamStore& store, const Tensor& e) const {
  return nn::linear(store, prefix + ".ffn.l2", ad::relu(nn::linear(store, prefix + ".ffn.l1", e)));
}

Tensor AnalysisStack::refine(const ad::ParamStore& store, const Tensor& e) const {
  const Tensor e1 = ad::layer_norm(ad::add(e, self_attention(store, e)), store.get(prefix + ".ln1.gain"),
                                   store.get(prefix + ".ln1.bias"));
  return ad::layer_norm(ad::add(e1, feed_forward(store, e1)), store.get(prefix + ".ln2.gain"),
                        store.get(prefix + ".ln2.bias"));
}

CrossAttender CrossAttender::create(ad::ParamStore& store, std::size_t d_model, bool learned_projections,
                                    bool normalize_qk, Rng& rng, std::string prefix) {
  CrossAttender c{std::move(prefix), d_model, learned_projections, normalize_qk};
  if (learned_projections) {
    nn::add_linear(store, c.prefix + ".q", d_model, d_model, rng, false);
    nn::add_linear(store, c.prefix + ".k", d_model, d_model, rng, false);
  }
  return c;
}

std::pair<Tensor, Tensor> CrossAttender::query_key(const ad::ParamStore& store, const Tensor& queries,
                                                   const Tensor& e_star) const {
  if (queries.cols() != d_model || e_star.cols() != d_model) {
    throw ShapeMismatch("cross_attend: query " + ad::shape_string(queries.shape()) + " vs keys " +
                        ad::shape_string(e_star.shape()));
  }
  Tensor q = queries, k = e_star;
  if (learned_projections) {
    q = nn::linear(store, prefix + ".q", q);
    k = nn::linear(store, prefix + ".k", k);
  }
  if (normalize_qk) {
    q = ad::l2_normalize_rows(q);
    k = ad::l2_normalize_rows(k);
  }
  return {q, k};
}

Tensor CrossAttender::attend(const ad::ParamStore& store, const Tensor& queries, const Tensor& e_star) const {
  const auto [q, k] = query_key(store, queries, e_star);
  return ad::attend(q, k, e_star, 1.0 / std::sqrt(static_cast<double>(d_model)));
}

std::vector<double> CrossAttender::weights(const ad::ParamStore& store, const Tensor& queries,
                                           const Tensor& e_star) const {
  const auto [q, k] = query_key(store, queries, e_star);
  return ad::attention_weights(q, k, 1.0 / std::sqrt(static_cast<double>(d_model)));
}

Tensor evaluator_head_input(const Tensor& e_star) { return ad::mean_rows(e_star); }

}  // namespace mfd
