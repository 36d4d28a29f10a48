#pragma once

#include <string>
#include <vector>

#include "mfd/params.hpp"

namespace mfd {

// One MHSA + FFN block with post-residual layer norms:
//   E' = LN(E + MHSA(E)),  E* = LN(E' + FFN(E'))
// No positional encoding is added.
struct AnalysisStack {
  std::string prefix = "deep";
  std::size_t d_model = 256;
  std::size_t heads = 8;
  std::size_t d_ff = 1024;

  std::size_t d_head() const { return d_model / heads; }

  // Throws ConfigError unless d_model is divisible by heads.
  static AnalysisStack create(ad::ParamStore& store, std::size_t d_model, std::size_t heads,
                              std::size_t d_ff, Rng& rng, std::string prefix = "deep");

  ad::Tensor self_attention(const ad::ParamStore& store, const ad::Tensor& e) const;
  ad::Tensor feed_forward(const ad::ParamStore& store, const ad::Tensor& e) const;
  // [rows, d_model] -> E* [rows, d_model]
  ad::Tensor refine(const ad::ParamStore& store, const ad::Tensor& e) const;
};

// f_deep = softmax(Q K^T / sqrt(d_2k)) V with Q the sentence embeddings and
// K = V = E*. Learned query/key projections and L2-normalized Q/K are opt-in.
struct CrossAttender {
  std::string prefix = "cross";
  std::size_t d_model = 256;
  bool learned_projections = false;
  bool normalize_qk = false;

  static CrossAttender create(ad::ParamStore& store, std::size_t d_model, bool learned_projections,
                              bool normalize_qk, Rng& rng, std::string prefix = "cross");

  // queries [n, d_model], e_star [rows, d_model] -> [n, d_model]
  ad::Tensor attend(const ad::ParamStore& store, const ad::Tensor& queries,
                    const ad::Tensor& e_star) const;
  // Row-major [n, rows] attention weights.
  std::vector<double> weights(const ad::ParamStore& store, const ad::Tensor& queries,
                              const ad::Tensor& e_star) const;

 private:
  std::pair<ad::Tensor, ad::Tensor> query_key(const ad::ParamStore& store, const ad::Tensor& queries,
                                              const ad::Tensor& e_star) const;
};

// Mean over the rows of E*; the evaluator MLP's input.
ad::Tensor evaluator_head_input(const ad::Tensor& e_star);

}  // namespace mfd
