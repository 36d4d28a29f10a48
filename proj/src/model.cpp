#include "mfd/model.hpp"

#include "mfd/error.hpp"
#include "mfd/nn.hpp"

namespace mfd {

using ad::Tensor;
using nlohmann::json;

std::vector<std::pair<std::string, std::size_t>> fusion_blocks(const ModelDims& d) {
  std::vector<std::pair<std::string, std::size_t>> out;
  if (d.use_low) out.emplace_back("low", d.low_width);
  if (d.use_high) out.emplace_back("high", d.d_proj);
  if (d.use_deep) out.emplace_back("deep", d.d_model);
  return out;
}

std::size_t ModelDims::fused_width() const {
  std::size_t w = 0;
  for (const auto& [name, width] : fusion_blocks(*this)) w += width;
  return w;
}

ModelDims ModelDims::from_config(const MfdConfig& c, std::size_t low_width) {
  ModelDims d;
  d.d_model = c.embedding.d_model;
  d.d_proj = c.model.d_proj;
  d.heads = c.train.heads;
  d.d_ff = c.model.d_ff == 0 ? 4 * c.embedding.d_model : c.model.d_ff;
  d.low_width = low_width;
  d.main_hidden = c.model.main_hidden;
  d.eval_hidden = c.model.eval_hidden;
  d.vector_fusion = c.model.fusion == "vector";
  d.use_low = c.model.use_low;
  d.use_high = c.model.use_high;
  d.use_deep = c.model.use_deep;
  d.cross_projections = c.model.cross_projections;
  d.normalize_qk = c.model.normalize_qk;
  return d;
}

json ModelDims::to_json() const {
  return {{"d_model", d_model},     {"d_proj", d_proj},
          {"heads", heads},         {"d_ff", d_ff},
          {"low_width", low_width}, {"main_hidden", main_hidden},
          {"eval_hidden", eval_hidden}, {"vector_fusion", vector_fusion},
          {"use_low", use_low},     {"use_high", use_high},
          {"use_deep", use_deep},   {"cross_projections", cross_projections},
          {"normalize_qk", normalize_qk}};
}

ModelDims ModelDims::from_json(const json& j) {
  try {
    ModelDims d;
    d.d_model = j.at("d_model");
    d.d_proj = j.at("d_proj");
    d.heads = j.at("heads");
    d.d_ff = j.at("d_ff");
    d.low_width = j.at("low_width");
    d.main_hidden = j.at("main_hidden");
    d.eval_hidden = j.at("eval_hidden");
    d.vector_fusion = j.at("vector_fusion");
    d.use_low = j.at("use_low");
    d.use_high = j.at("use_high");
    d.use_deep = j.at("use_deep");
    d.cross_projections = j.at("cross_projections");
    d.normalize_qk = j.at("normalize_qk");
    return d;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("model dimensions: ") + e.what());
  }
}

JointLoss joint_loss(const ForwardOutput& out, const Tensor& targets, double beta) {
  JointLoss l;
  l.pred = ad::mse(out.pred, targets);
  if (out.eval.defined()) {
    l.llm = ad::mse(out.eval, targets);
    l.total = ad::add(l.pred, ad::scale(l.llm, beta));
  } else {
    l.llm = Tensor::scalar(0.0);
    l.total = l.pred;
  }
  return l;
}

Tensor fuse(const std::vector<Tensor>& blocks, const std::vector<Tensor>& weights) {
  if (blocks.size() != weights.size() || blocks.empty()) {
    throw ShapeMismatch("fuse: expected one weight per block");
  }
  std::vector<Tensor> parts;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::size_t width = blocks[i].cols();
    Tensor w = weights[i];
    if (w.numel() == 1 && width != 1) {
      w = ad::matmul(w.reshape({1, 1}), Tensor::full({1, width}, 1.0)).reshape({width});
    }
    parts.push_back(ad::mul_row(blocks[i], w));
  }
  return parts.size() == 1 ? parts.front() : ad::concat(parts);
}

namespace {

Tensor gather_rows(const Tensor& x, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return x;
  const std::size_t n = x.cols();
  std::vector<double> out;
  out.reserve(rows.size() * n);
  for (std::size_t r : rows) {
    if (r >= x.rows()) throw PreconditionError("sentence row out of range");
    const auto v = x.data().subspan(r * n, n);
    out.insert(out.end(), v.begin(), v.end());
  }
  return Tensor::matrix(rows.size(), n, std::move(out));
}

}  // namespace

FusionModel FusionModel::create(const ModelDims& dims, std::uint64_t seed) {
  FusionModel m(dims);
  Rng rng(seed);
  auto& s = m.store_;
  if (dims.use_high) m.head_ = ProjectionHead::create(s, dims.d_model, dims.d_proj, rng);
  if (dims.use_deep) {
    m.stack_ = AnalysisStack::create(s, dims.d_model, dims.heads, dims.d_ff, rng);
    m.cross_ = CrossAttender::create(s, dims.d_model, dims.cross_projections, dims.normalize_qk, rng);
    nn::add_linear(s, "eval.l1", dims.d_model, dims.eval_hidden, rng);
    nn::add_linear(s, "eval.l2", dims.eval_hidden, 3, rng);
  }
  for (const auto& [name, width] : fusion_blocks(dims)) {
    s.add("fusion." + name, Tensor::full({dims.vector_fusion ? width : 1}, 1.0, true));
  }
  nn::add_linear(s, "mlp.l1", dims.fused_width(), dims.main_hidden, rng);
  nn::add_linear(s, "mlp.l2", dims.main_hidden, 3, rng);
  return m;
}

FusionModel FusionModel::from_params(const ModelDims& dims, ad::ParamStore params) {
  FusionModel reference = create(dims, 0);
  for (const auto& [path, t] : reference.store_.entries()) {
    if (!params.contains(path)) throw CheckpointError("checkpoint is missing parameter " + path);
    if (params.get(path).shape() != t.shape()) {
      throw CheckpointError("parameter " + path + " has shape " + ad::shape_string(params.get(path).shape()) +
                            ", expected " + ad::shape_string(t.shape()));
    }
  }
  for (const auto& [path, t] : params.entries()) {
    if (!reference.store_.contains(path)) throw CheckpointError("unexpected parameter " + path);
  }
  reference.store_ = std::move(params);
  return reference;
}

FusionModel::Blocks FusionModel::blocks(const DocInputs& doc, const std::vector<std::size_t>& rows) const {
  Blocks b;
  const Tensor q = gather_rows(doc.sentences, rows);
  if (dims_.use_low) b.low = gather_rows(doc.low, rows);
  if (dims_.use_high) b.high = head_.features(store_, q);
  if (dims_.use_deep) b.deep = cross_.attend(store_, q, stack_.refine(store_, doc.analysis));
  return b;
}

ForwardOutput FusionModel::forward(const std::vector<Item>& batch) const {
  if (batch.empty()) throw PreconditionError("empty batch");
  std::vector<Tensor> low, high, deep, eval;
  for (const auto& item : batch) {
    const std::size_t n = item.rows.empty() ? item.doc->size() : item.rows.size();
    const Tensor q = gather_rows(item.doc->sentences, item.rows);
    if (dims_.use_low) low.push_back(gather_rows(item.doc->low, item.rows));
    if (dims_.use_high) high.push_back(head_.features(store_, q));
    if (dims_.use_deep) {
      const Tensor e_star = stack_.refine(store_, item.doc->analysis);
      deep.push_back(cross_.attend(store_, q, e_star));
      const Tensor h = ad::relu(nn::linear(store_, "eval.l1", evaluator_head_input(e_star)));
      eval.push_back(ad::repeat_rows(ad::sigmoid(nn::linear(store_, "eval.l2", h)), n));
    }
  }
  auto stack_rows = [](const std::vector<Tensor>& parts) {
    return parts.size() == 1 ? parts.front() : ad::concat_rows(parts);
  };
  std::vector<Tensor> blocks, weights;
  if (dims_.use_low) {
    blocks.push_back(stack_rows(low));
    weights.push_back(store_.get("fusion.low"));
  }
  if (dims_.use_high) {
    blocks.push_back(stack_rows(high));
    weights.push_back(store_.get("fusion.high"));
  }
  if (dims_.use_deep) {
    blocks.push_back(stack_rows(deep));
    weights.push_back(store_.get("fusion.deep"));
  }
  const Tensor fused = fuse(blocks, weights);
  const Tensor hidden = ad::relu(nn::linear(store_, "mlp.l1", fused));
  ForwardOutput out;
  out.pred = ad::sigmoid(nn::linear(store_, "mlp.l2", hidden));
  if (dims_.use_deep) out.eval = stack_rows(eval);
  return out;
}

ForwardOutput FusionModel::forward(const DocInputs& doc) const { return forward({Item{&doc, {}}}); }

std::vector<InvolvementScores> FusionModel::predict(const DocInputs& doc) const {
  const Tensor pred = forward(doc).pred.detach();
  std::vector<InvolvementScores> out(pred.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {pred.at(i, 0), pred.at(i, 1), pred.at(i, 2)};
  return out;
}

}  // namespace mfd

namespace mfd {

std::vector<InvolvementScores> predict_sentences(const FusionModel* model, const DocInputs& doc) {
  if (!model) throw ModelNotLoaded("no trained model is loaded");
  return model->predict(doc);
}

}  // namespace mfd
