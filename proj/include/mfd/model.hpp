#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/config.hpp"
#include "mfd/contrastive.hpp"
#include "mfd/corpus.hpp"
#include "mfd/deep.hpp"
#include "mfd/params.hpp"

namespace mfd {

struct ModelDims {
  std::size_t d_model = 256;
  std::size_t d_proj = 128;
  std::size_t heads = 8;
  std::size_t d_ff = 1024;
  std::size_t low_width = 98;
  std::size_t main_hidden = 128;
  std::size_t eval_hidden = 64;
  bool vector_fusion = true;
  bool use_low = true;
  bool use_high = true;
  bool use_deep = true;
  bool cross_projections = false;
  bool normalize_qk = false;

  std::size_t fused_width() const;
  static ModelDims from_config(const MfdConfig& config, std::size_t low_width);
  nlohmann::json to_json() const;
  static ModelDims from_json(const nlohmann::json& j);
};

// Constant per-document inputs.
struct DocInputs {
  ad::Tensor sentences;  // [n, d_model] sentence embeddings
  ad::Tensor low;        // [n, low_width] normalized low-level features
  ad::Tensor analysis;   // [rows, d_model] embedded chunks of the linguistic analysis
  std::size_t size() const { return sentences.rows(); }
};

struct ForwardOutput {
  ad::Tensor pred;  // [N, 3]
  ad::Tensor eval;  // [N, 3]; the document-level evaluator output repeated per sentence.
                    // Undefined when the deep block is disabled.
};

struct JointLoss {
  ad::Tensor total, pred, llm;
};

// L = MSE(pred, y) + beta * MSE(eval, y). L_llm is zero when eval is undefined.
JointLoss joint_loss(const ForwardOutput& out, const ad::Tensor& targets, double beta);

// concat(f_k * w_k). Each weight is either [width_k] or a single scalar [1].
ad::Tensor fuse(const std::vector<ad::Tensor>& blocks, const std::vector<ad::Tensor>& weights);

class FusionModel {
 public:
  struct Item {
    const DocInputs* doc = nullptr;
    std::vector<std::size_t> rows;  // selected sentences; empty means all
  };
  struct Blocks {
    ad::Tensor low, high, deep;  // undefined when the block is disabled
  };

  static FusionModel create(const ModelDims& dims, std::uint64_t seed);
  // Adopts trained parameters; throws CheckpointError when any is missing or misshapen.
  static FusionModel from_params(const ModelDims& dims, ad::ParamStore params);

  const ModelDims& dims() const { return dims_; }
  ad::ParamStore& params() { return store_; }
  const ad::ParamStore& params() const { return store_; }
  const ProjectionHead& head() const { return head_; }
  const AnalysisStack& stack() const { return stack_; }
  const CrossAttender& cross() const { return cross_; }

  Blocks blocks(const DocInputs& doc, const std::vector<std::size_t>& rows = {}) const;
  // Rows of the output follow the batch order, then each item's row order.
  ForwardOutput forward(const std::vector<Item>& batch) const;
  ForwardOutput forward(const DocInputs& doc) const;
  std::vector<InvolvementScores> predict(const DocInputs& doc) const;

 private:
  explicit FusionModel(ModelDims dims) : dims_(dims) {}

  ModelDims dims_;
  ad::ParamStore store_;
  ProjectionHead head_;
  AnalysisStack stack_;
  CrossAttender cross_;
};

// The ordered block names of the fused vector with their widths.
std::vector<std::pair<std::string, std::size_t>> fusion_blocks(const ModelDims& dims);

}  // namespace mfd

namespace mfd {

// Throws ModelNotLoaded when `model` is null.
std::vector<InvolvementScores> predict_sentences(const FusionModel* model, const DocInputs& doc);

}  // namespace mfd
