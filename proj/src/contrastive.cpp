#include "mfd/contrastive.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "mfd/error.hpp"
#include "mfd/nn.hpp"

namespace mfd {

using ad::Tensor;

double adjusted_cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatch("adjusted_cosine: vectors differ in length");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw ZeroVector("adjusted_cosine of a zero vector");
  return dot / (2.0 * std::sqrt(na) * std::sqrt(nb)) + 0.5;
}

std::vector<Quadruple> build_quadruples(const std::vector<std::string>& llm_texts,
                                        const std::vector<std::string>& human_texts,
                                        LlmClient& llm, std::uint64_t seed) {
  if (llm_texts.size() != human_texts.size()) {
    throw PreconditionError("need one human text per LLM text");
  }
  if (llm_texts.size() < 2) throw PreconditionError("need at least two samples for quadruples");
  Rng rng(seed);
  std::vector<Quadruple> out;
  out.reserve(llm_texts.size());
  for (std::size_t i = 0; i < llm_texts.size(); ++i) {
    // Uniform over j != i.
    std::size_t j = static_cast<std::size_t>(rng.below(llm_texts.size() - 1));
    if (j >= i) ++j;
    const auto v = llm.generate_variants(llm_texts[i]);
    out.push_back({"q" + std::to_string(i), llm_texts[i], v.human_like.text, v.rewritten.text,
                   human_texts[j], llm.prompts().hashes()});
  }
  return out;
}

std::vector<QuadrupleEmbeddings> embed_quadruples(const std::vector<Quadruple>& quads,
                                                  EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  texts.reserve(quads.size() * 4);
  for (const auto& q : quads) {
    texts.insert(texts.end(), {q.t_llm, q.t_human_like, q.t_rewritten, q.t_human});
  }
  auto e = provider.embed(texts);
  std::vector<QuadrupleEmbeddings> out(quads.size());
  for (std::size_t i = 0; i < quads.size(); ++i) {
    out[i] = {std::move(e[4 * i].vector), std::move(e[4 * i + 1].vector),
              std::move(e[4 * i + 2].vector), std::move(e[4 * i + 3].vector)};
  }
  return out;
}

std::string serialize_quadruples(const std::vector<Quadruple>& quads) {
  std::string out;
  for (const auto& q : quads) {
    nlohmann::json j = {{"id", q.id},
                        {"t_llm", q.t_llm},
                        {"t_human_like", q.t_human_like},
                        {"t_rewritten", q.t_rewritten},
                        {"t_human", q.t_human},
                        {"template_hashes", q.template_hashes}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<Quadruple> parse_quadruples(std::string_view jsonl) {
  std::vector<Quadruple> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    const auto line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("id").get<std::string>(), j.at("t_llm").get<std::string>(),
                     j.at("t_human_like").get<std::string>(), j.at("t_rewritten").get<std::string>(),
                     j.at("t_human").get<std::string>(),
                     j.value("template_hashes", nlohmann::json::object())});
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(line_no, e.what());
    }
  }
  return out;
}

ProjectionHead ProjectionHead::create(ad::ParamStore& store, std::size_t d_model, std::size_t d_proj,
                                      Rng& rng, std::string prefix) {
  ProjectionHead h{std::move(prefix), d_model, d_proj};
  nn::add_linear(store, h.prefix + ".l1", d_model, d_model, rng);
  nn::add_linear(store, h.prefix + ".l2", d_model, d_proj, rng);
  return h;
}

Tensor ProjectionHead::project(const ad::ParamStore& store, const Tensor& x) const {
  return nn::linear(store, prefix + ".l2", ad::relu(nn::linear(store, prefix + ".l1", x)));
}

Tensor ProjectionHead::features(const ad::ParamStore& store, const Tensor& x) const {
  return ad::l2_normalize_rows(project(store, x));
}

namespace {

Tensor row(const std::vector<double>& v) { return Tensor::matrix(1, v.size(), v); }

Tensor distance(const Tensor& a, const Tensor& b) {
  // 1 - ((a.b)/2 + 1/2) on unit rows
  return ad::add_scalar(ad::scale(nn::row_dot(a, b), -0.5), 0.5);
}

void check_alpha(double alpha) {
  if (!(alpha > 0)) throw InvalidMargin("margin alpha must be > 0");
}

}  // namespace

BatchDistances batch_distances(const ad::ParamStore& store, const ProjectionHead& head,
                               const Tensor& llm, const Tensor& human_like, const Tensor& rewritten,
                               const Tensor& negatives) {
  const Tensor a = head.features(store, llm);
  const Tensor hl = head.features(store, human_like);
  const Tensor rw = head.features(store, rewritten);
  const Tensor hu = head.features(store, negatives);
  return {ad::concat({distance(a, hl), distance(a, rw)}),
          ad::concat({distance(a, hu), distance(hl, hu), distance(rw, hu)})};
}

PairDistances pair_distances(const QuadrupleEmbeddings& q, const ProjectionHead& head,
                             const ad::ParamStore& store) {
  const auto p = [&](const std::vector<double>& v) {
    const Tensor t = head.project(store, row(v));
    return std::vector<double>(t.data().begin(), t.data().end());
  };
  return pair_distances({p(q.llm), p(q.human_like), p(q.rewritten), p(q.human)});
}

PairDistances pair_distances(const QuadrupleEmbeddings& q) {
  const auto &a = q.llm, &hl = q.human_like, &rw = q.rewritten, &hu = q.human;
  PairDistances d;
  d.pos = {1 - adjusted_cosine(a, hl), 1 - adjusted_cosine(a, rw)};
  d.neg = {1 - adjusted_cosine(a, hu), 1 - adjusted_cosine(hl, hu), 1 - adjusted_cosine(rw, hu)};
  return d;
}

double twice_triplet_loss(const PairDistances& d, double alpha) {
  check_alpha(alpha);
  double loss = 0;
  for (double p : d.pos) {
    for (double n : d.neg) loss += std::max(0.0, p - n + alpha);
  }
  return loss;
}

std::size_t active_hinges(const PairDistances& d, double alpha) {
  check_alpha(alpha);
  std::size_t n_active = 0;
  for (double p : d.pos) {
    for (double n : d.neg) n_active += (p - n + alpha > 0) ? 1 : 0;
  }
  return n_active;
}

Tensor twice_triplet_loss(const Tensor& pos, const Tensor& neg, double alpha) {
  check_alpha(alpha);
  if (pos.cols() != 2 || neg.cols() != 3 || pos.rows() != neg.rows()) {
    throw ShapeMismatch("twice_triplet_loss: expected pos [n,2] and neg [n,3], got " +
                        ad::shape_string(pos.shape()) + " and " + ad::shape_string(neg.shape()));
  }
  std::vector<Tensor> hinges;
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t l = 0; l < 3; ++l) {
      hinges.push_back(ad::relu(ad::add_scalar(
          ad::sub(ad::slice_cols(pos, k, 1), ad::slice_cols(neg, l, 1)), alpha)));
    }
  }
  // [n,6] -> sum over hinges, mean over rows
  return ad::scale(ad::sum(ad::concat(hinges)), 1.0 / static_cast<double>(pos.rows()));
}

namespace {

Tensor stack(const std::vector<const std::vector<double>*>& rows) {
  const std::size_t d = rows.front()->size();
  std::vector<double> data;
  data.reserve(rows.size() * d);
  for (const auto* r : rows) data.insert(data.end(), r->begin(), r->end());
  return Tensor::matrix(rows.size(), d, std::move(data));
}

}  // namespace

double contrastive_loss(const std::vector<QuadrupleEmbeddings>& data, const ProjectionHead& head,
                        const ad::ParamStore& store, double alpha) {
  if (data.empty()) throw PreconditionError("contrastive loss over an empty set");
  std::vector<const std::vector<double>*> a, hl, rw, hu;
  for (const auto& q : data) {
    a.push_back(&q.llm);
    hl.push_back(&q.human_like);
    rw.push_back(&q.rewritten);
    hu.push_back(&q.human);
  }
  const auto d = batch_distances(store, head, stack(a), stack(hl), stack(rw), stack(hu));
  return twice_triplet_loss(d.pos.detach(), d.neg.detach(), alpha).item();
}

ContrastiveHistory train_contrastive(const std::vector<QuadrupleEmbeddings>& data,
                                     const ProjectionHead& head, ad::ParamStore& store,
                                     const ContrastiveConfig& config) {
  check_alpha(config.alpha);
  if (data.empty()) throw PreconditionError("train_contrastive needs at least one quadruple");
  if (config.batch_size == 0) throw ConfigError("contrastive.batch_size", "must be positive");

  // Only the head trains here.
  std::map<std::string, bool> previous;
  for (const auto& [path, t] : store.entries()) previous[path] = t.requires_grad();
  store.set_trainable("", false);
  store.set_trainable(head.prefix + ".", true);

  ContrastiveHistory history;
  history.initial_loss = contrastive_loss(data, head, store, config.alpha);
  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    const double lr = ad::steplr(epoch, config.lr, config.step_size, config.gamma);
    double total = 0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::size_t n = end - start;
      std::vector<const std::vector<double>*> a, hl, rw, hu;
      for (std::size_t i = start; i < end; ++i) {
        const auto& q = data[order[i]];
        a.push_back(&q.llm);
        hl.push_back(&q.human_like);
        rw.push_back(&q.rewritten);
        if (n == 1) {
          hu.push_back(&q.human);
        } else {
          std::size_t j = static_cast<std::size_t>(rng.below(n - 1));
          if (j >= i - start) ++j;
          hu.push_back(&data[order[start + j]].human);
        }
      }
      store.zero_grad();
      const auto d = batch_distances(store, head, stack(a), stack(hl), stack(rw), stack(hu));
      const Tensor loss = twice_triplet_loss(d.pos, d.neg, config.alpha);
      total += loss.item();
      ++batches;
      ad::backward(loss);
      ad::adamw_step(store, {.lr = lr, .weight_decay = config.weight_decay});
    }
    history.epoch_loss.push_back(total / static_cast<double>(batches));
  }
  store.zero_grad();
  for (const auto& [path, on] : previous) store.get(path).set_requires_grad(on);
  return history;
}

std::vector<double> high_feature(std::span<const double> embedding, const ProjectionHead& head,
                                 const ad::ParamStore& store) {
  const Tensor f = head.features(store, Tensor::matrix(1, embedding.size(),
                                                       std::vector<double>(embedding.begin(), embedding.end())));
  return {f.data().begin(), f.data().end()};
}

}  // namespace mfd
