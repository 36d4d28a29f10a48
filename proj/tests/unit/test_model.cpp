#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../common/gradcheck.hpp"
#include "mfd/config.hpp"
#include "mfd/contrastive.hpp"
#include "mfd/deep.hpp"
#include "mfd/error.hpp"
#include "mfd/model.hpp"
#include "mfd/train.hpp"

using namespace mfd;
using ad::Tensor;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng) { return Tensor::matrix(r, c, random_vec(r * c, rng)); }

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

// Hand-written oracle: six hinges summed.
double hinge_oracle(const std::array<double, 2>& pos, const std::array<double, 3>& neg, double alpha) {
  double total = 0;
  for (double p : pos)
    for (double n : neg) total += std::max(0.0, p - n + alpha);
  return total;
}

ModelDims small_dims() {
  ModelDims d;
  d.d_model = 16;
  d.d_proj = 8;
  d.heads = 4;
  d.d_ff = 32;
  d.low_width = 6;
  d.main_hidden = 8;
  d.eval_hidden = 4;
  return d;
}

DocInputs random_doc(const ModelDims& d, std::size_t n, std::size_t rows, Rng& rng) {
  return {random_matrix(n, d.d_model, rng), random_matrix(n, d.low_width, rng), random_matrix(rows, d.d_model, rng)};
}

}  // namespace

TEST_CASE("adjusted cosine") {
  const std::vector<double> v = {1, 2, 3}, neg = {-1, -2, -3};
  CHECK(adjusted_cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(adjusted_cosine(v, neg) == doctest::Approx(0.0));
  CHECK(adjusted_cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.5);
  CHECK_THROWS_AS(adjusted_cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}), ZeroVector);
}

TEST_CASE("twice-triplet fixtures") {
  PairDistances a{{0.1, 0.1}, {0.5, 0.5, 0.5}};
  CHECK(twice_triplet_loss(a, 0.3) == 0.0);
  CHECK(active_hinges(a, 0.3) == 0);
  PairDistances b{{0.4, 0.4}, {0.2, 0.2, 0.2}};
  CHECK(twice_triplet_loss(b, 0.3) == hinge_oracle(b.pos, b.neg, 0.3));
  CHECK(twice_triplet_loss(b, 0.3) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(active_hinges(b, 0.3) == 6);
  // (0.4-0.2+0.3) + (0.4-0.6+0.3) * 2 + (0.1-0.2+0.3) = 0.5 + 0.2 + 0.2 = 0.9
  PairDistances c{{0.4, 0.1}, {0.2, 0.6, 0.6}};
  CHECK(twice_triplet_loss(c, 0.3) == hinge_oracle(c.pos, c.neg, 0.3));
  CHECK(twice_triplet_loss(c, 0.3) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(active_hinges(c, 0.3) == 4);
  CHECK_THROWS_AS(twice_triplet_loss(c, 0.0), InvalidMargin);
  CHECK_THROWS_AS(twice_triplet_loss(c, -1.0), InvalidMargin);

  const Tensor pos = Tensor::matrix(2, 2, {0.4, 0.4, 0.4, 0.1});
  const Tensor neg = Tensor::matrix(2, 3, {0.2, 0.2, 0.2, 0.2, 0.6, 0.6});
  CHECK(twice_triplet_loss(pos, neg, 0.3).item() == doctest::Approx((3.0 + 0.9) / 2).epsilon(1e-15));
}

TEST_CASE("triplet loss properties") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    PairDistances d;
    for (auto& p : d.pos) p = rng.uniform();
    for (auto& n : d.neg) n = rng.uniform();
    const double alpha = rng.uniform(0.01, 0.5);
    const double loss = twice_triplet_loss(d, alpha);
    CHECK(loss >= 0);
    CHECK(loss == hinge_oracle(d.pos, d.neg, alpha));
    bool all_satisfied = true;
    for (double p : d.pos)
      for (double n : d.neg) all_satisfied &= n >= p + alpha;
    CHECK((loss == 0) == all_satisfied);
    PairDistances lower_neg = d;
    lower_neg.neg[rng.below(3)] -= rng.uniform(0, 0.2);
    CHECK(twice_triplet_loss(lower_neg, alpha) >= loss);
    PairDistances lower_pos = d;
    lower_pos.pos[rng.below(2)] -= rng.uniform(0, 0.2);
    CHECK(twice_triplet_loss(lower_pos, alpha) <= loss);
  }
}

TEST_CASE("pair distances") {
  const std::vector<double> v = {0.3, -0.2, 0.9};
  std::vector<double> m(v.size());
  std::transform(v.begin(), v.end(), m.begin(), [](double x) { return -x; });
  const auto same = pair_distances({v, v, v, v});
  for (double x : same.pos) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
  for (double x : same.neg) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
  const auto anti = pair_distances({v, v, v, m});
  for (double x : anti.pos) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
  for (double x : anti.neg) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));

  // Through a random head, recomputed from the definition.
  ad::ParamStore store;
  Rng rng(4);
  const auto head = ProjectionHead::create(store, 6, 4, rng);
  const QuadrupleEmbeddings q{random_vec(6, rng), random_vec(6, rng), random_vec(6, rng), random_vec(6, rng)};
  const auto d = pair_distances(q, head, store);
  const auto f = [&](const std::vector<double>& x) { return high_feature(x, head, store); };
  CHECK(d.pos[0] == doctest::Approx(1 - adjusted_cosine(f(q.llm), f(q.human_like))).epsilon(1e-12));
  CHECK(d.pos[1] == doctest::Approx(1 - adjusted_cosine(f(q.llm), f(q.rewritten))).epsilon(1e-12));
  CHECK(d.neg[0] == doctest::Approx(1 - adjusted_cosine(f(q.llm), f(q.human))).epsilon(1e-12));
  CHECK(d.neg[1] == doctest::Approx(1 - adjusted_cosine(f(q.human_like), f(q.human))).epsilon(1e-12));
  CHECK(d.neg[2] == doctest::Approx(1 - adjusted_cosine(f(q.rewritten), f(q.human))).epsilon(1e-12));
  const auto hf = f(q.llm);
  CHECK(std::sqrt(std::inner_product(hf.begin(), hf.end(), hf.begin(), 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hf == f(q.llm));
}

TEST_CASE("contrastive training descends and is deterministic") {
  // Anchors and positives cluster around +c, human texts around -c.
  Rng rng(8);
  const auto c = random_vec(12, rng);
  std::vector<QuadrupleEmbeddings> data;
  auto jitter = [&](double sign) {
    auto v = c;
    for (auto& x : v) x = sign * x + rng.uniform(-0.3, 0.3);
    return v;
  };
  for (int i = 0; i < 8; ++i) data.push_back({jitter(1), jitter(1), jitter(1), jitter(-1)});
  ContrastiveConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 4;
  cfg.lr = 1e-2;
  auto run = [&] {
    ad::ParamStore store;
    Rng init(1);
    const auto head = ProjectionHead::create(store, 12, 6, init);
    return train_contrastive(data, head, store, cfg);
  };
  const auto h1 = run();
  CHECK(h1.epoch_loss.back() < h1.initial_loss);
  CHECK(run().epoch_loss == h1.epoch_loss);
  cfg.alpha = 0;
  CHECK_THROWS_AS(run(), InvalidMargin);
}

TEST_CASE("quadruple JSONL round trip") {
  std::vector<Quadruple> q = {{"q0", "a", "b", "c", "d", {{"rewrite", "h"}}}, {"q1", "e\"", "f\n", "g", "h", {}}};
  const auto back = parse_quadruples(serialize_quadruples(q));
  REQUIRE(back.size() == 2);
  CHECK(back[1].t_llm == "e\"");
  CHECK(back[1].t_human_like == "f\n");
  CHECK(back[0].template_hashes == q[0].template_hashes);
}

TEST_CASE("analysis stack shapes and layer norm") {
  ad::ParamStore store;
  Rng rng(2);
  const auto stack = AnalysisStack::create(store, 16, 4, 64, rng);
  CHECK_THROWS_AS(AnalysisStack::create(store, 10, 4, 40, rng, "bad"), ConfigError);
  for (std::size_t rows : {1u, 5u}) {
    const auto e = stack.refine(store, random_matrix(rows, 16, rng));
    CHECK(e.shape() == ad::Shape{rows, 16});
    for (std::size_t r = 0; r < rows; ++r) {
      double mean = 0;
      for (std::size_t j = 0; j < 16; ++j) {
        CHECK(std::isfinite(e.at(r, j)));
        mean += e.at(r, j);
      }
      CHECK(std::abs(mean / 16) <= 1e-6);
    }
  }
  CHECK_THROWS_AS(stack.refine(store, random_matrix(2, 8, rng)), ShapeMismatch);
}

TEST_CASE("zero branches reduce the stack to LN(LN(E))") {
  ad::ParamStore store;
  Rng rng(3);
  const auto stack = AnalysisStack::create(store, 8, 2, 16, rng);
  for (const char* p : {"deep.mhsa.o.w", "deep.ffn.l2.w", "deep.ffn.l2.b"}) {
    for (auto& x : store.get(p).mutable_data()) x = 0.0;
  }
  const Tensor e = random_matrix(3, 8, rng);
  const Tensor g = Tensor::full({8}, 1.0), b = Tensor::zeros({8});
  const Tensor expected = ad::layer_norm(ad::layer_norm(e, g, b), g, b);
  const Tensor got = stack.refine(store, e);
  for (std::size_t i = 0; i < got.numel(); ++i) CHECK(got.at(i) == doctest::Approx(expected.at(i)).epsilon(1e-12));
}

TEST_CASE("cross attention examples") {
  ad::ParamStore store;
  Rng rng(6);
  const auto cross = CrossAttender::create(store, 4, false, false, rng);
  const Tensor q = random_matrix(3, 4, rng);
  const Tensor one = random_matrix(1, 4, rng);
  const auto single = cross.attend(store, q, one);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(single.at(i, j) == one.at(0, j));

  const Tensor same = Tensor::matrix(3, 4, {1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4});
  const auto conv = cross.attend(store, q, same);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(conv.at(i, j) == doctest::Approx(same.at(0, j)).epsilon(1e-15));

  // Query along row 0 scaled by 20: weights (1, e^{-20 * 2 / 2}) / Z, so row 1 weight ~ 4.5e-5.
  const Tensor kv = Tensor::matrix(2, 4, {1, 0, 0, 0, 0, 1, 0, 0});
  const auto sharp = cross.attend(store, Tensor::matrix(1, 4, {20, 0, 0, 0}), kv);
  CHECK(std::abs(sharp.at(0, 0) - 1.0) < 1e-3);
  CHECK(std::abs(sharp.at(0, 1)) < 1e-3);
  const auto w = cross.weights(store, Tensor::matrix(1, 4, {20, 0, 0, 0}), kv);
  CHECK(w[1] == doctest::Approx(1.0 / (1.0 + std::exp(10.0))).epsilon(1e-12));

  CHECK(values(evaluator_head_input(Tensor::matrix(2, 2, {1, 0, 0, 1}))) == std::vector<double>{0.5, 0.5});
  CHECK(values(evaluator_head_input(one)) == values(one));
}

TEST_CASE("fuse examples and bilinearity") {
  Rng rng(10);
  const Tensor a = random_matrix(2, 3, rng), b = random_matrix(2, 2, rng), c = random_matrix(2, 2, rng);
  const Tensor ones3 = Tensor::full({3}, 1.0), ones2 = Tensor::full({2}, 1.0);
  const auto plain = fuse({a, b, c}, {ones3, ones2, ones2});
  CHECK(plain.shape() == ad::Shape{2, 7});
  CHECK(values(plain) == values(ad::concat({a, b, c})));
  const auto zero_low = fuse({a, b, c}, {Tensor::zeros({3}), ones2, ones2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(zero_low.at(i, j) == 0.0);
  CHECK_THROWS_AS(fuse({a, b}, {ones2, ones2}), ShapeMismatch);

  for (int trial = 0; trial < 20; ++trial) {
    const double k = rng.uniform(0.5, 4.0);
    const Tensor w = Tensor::vector(random_vec(3, rng));
    std::vector<double> wk(3);
    for (std::size_t j = 0; j < 3; ++j) wk[j] = w.at(j) / k;
    const auto f1 = fuse({a}, {w});
    const auto f2 = fuse({ad::scale(a, k)}, {Tensor::vector(wk)});
    for (std::size_t i = 0; i < f1.numel(); ++i) CHECK(f1.at(i) == doctest::Approx(f2.at(i)).epsilon(1e-12));
  }
  const auto scalar = fuse({a}, {Tensor::scalar(2.0).reshape({1})});
  CHECK(values(scalar) == values(ad::scale(a, 2.0)));
}

TEST_CASE("joint loss examples") {
  const Tensor y = Tensor::matrix(2, 3, {0, 0.5, 1, 1, 0.5, 0});
  const auto zero = joint_loss({y, y}, y, 0.5);
  CHECK(zero.total.item() == 0.0);
  CHECK(zero.pred.item() == 0.0);
  CHECK(zero.llm.item() == 0.0);
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor p = random_matrix(2, 3, rng), e = random_matrix(2, 3, rng);
    const auto l0 = joint_loss({p, e}, y, 0.0);
    CHECK(l0.total.item() == l0.pred.item());
    const double b1 = rng.uniform(0, 1), b2 = b1 + rng.uniform(0, 1);
    const auto l1 = joint_loss({p, e}, y, b1), l2 = joint_loss({p, e}, y, b2);
    CHECK(l1.total.item() >= l1.pred.item());
    CHECK(l2.total.item() >= l1.total.item());
    CHECK(l1.total.item() == doctest::Approx(l1.pred.item() + b1 * l1.llm.item()).epsilon(1e-14));
  }
  CHECK_THROWS_AS(joint_loss({Tensor::zeros({2, 2}), Tensor()}, y, 0.5), ShapeMismatch);
}

TEST_CASE("model forward: shapes, ranges, ablations, zero head") {
  Rng rng(5);
  const ModelDims d = small_dims();
  const auto model = FusionModel::create(d, 1);
  const DocInputs doc = random_doc(d, 3, 2, rng);
  const auto out = model.forward(doc);
  CHECK(out.pred.shape() == ad::Shape{3, 3});
  CHECK(out.eval.shape() == ad::Shape{3, 3});
  for (double v : out.pred.data()) CHECK((v > 0 && v < 1));
  for (std::size_t j = 0; j < 3; ++j) CHECK(out.eval.at(0, j) == out.eval.at(2, j));

  auto zeroed = FusionModel::create(d, 1);
  for (const char* p : {"mlp.l2.w", "mlp.l2.b"})
    for (auto& x : zeroed.params().get(p).mutable_data()) x = 0.0;
  for (const auto& s : zeroed.predict(doc)) CHECK(s == InvolvementScores{0.5, 0.5, 0.5});
  CHECK_THROWS_AS(predict_sentences(nullptr, doc), ModelNotLoaded);

  // A batch of row subsets matches per-document forwards.
  const DocInputs other = random_doc(d, 4, 3, rng);
  const auto batch = model.forward({{&doc, {2, 0}}, {&other, {1}}});
  const auto full_other = model.forward(other);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(batch.pred.at(0, j) == doctest::Approx(out.pred.at(2, j)).epsilon(1e-14));
    CHECK(batch.pred.at(1, j) == doctest::Approx(out.pred.at(0, j)).epsilon(1e-14));
    CHECK(batch.pred.at(2, j) == doctest::Approx(full_other.pred.at(1, j)).epsilon(1e-14));
  }

  for (int off = 0; off < 3; ++off) {
    ModelDims a = d;
    (off == 0 ? a.use_low : off == 1 ? a.use_high : a.use_deep) = false;
    const auto m = FusionModel::create(a, 2);
    const auto o = m.forward(doc);
    CHECK(o.pred.shape() == ad::Shape{3, 3});
    CHECK(o.eval.defined() == a.use_deep);
    CHECK(m.params().get("mlp.l1.w").shape()[0] == a.fused_width());
  }
  ModelDims s = d;
  s.vector_fusion = false;
  CHECK(FusionModel::create(s, 1).params().get("fusion.low").numel() == 1);
}

TEST_CASE("full-model gradient check with an unfrozen head") {
  Rng rng(31);
  ModelDims d = small_dims();
  d.cross_projections = true;
  auto model = FusionModel::create(d, 3);
  const DocInputs doc = random_doc(d, 3, 2, rng);
  auto targets = random_vec(9, rng);
  for (auto& x : targets) x = 0.5 * (x + 1);
  const Tensor y = Tensor::matrix(3, 3, targets);
  auto loss = [&] { return joint_loss(model.forward(doc), y, 0.5).total; };
  std::vector<Tensor> params;
  for (const auto& [path, t] : model.params().entries()) params.push_back(t);
  const auto r = testutil::gradcheck(loss, params, 40, 77);
  CHECK(r.failed == 0);
  CHECK(r.checked == 40);
}

TEST_CASE("from_params validates parameters") {
  const ModelDims d = small_dims();
  auto m = FusionModel::create(d, 1);
  auto same = FusionModel::from_params(d, m.params());
  CHECK(values(same.params().get("mlp.l1.w")) == values(m.params().get("mlp.l1.w")));
  ad::ParamStore missing;
  CHECK_THROWS_AS(FusionModel::from_params(d, missing), CheckpointError);
  CHECK(ModelDims::from_json(d.to_json()).fused_width() == d.fused_width());
}

TEST_CASE("config defaults, overrides and strict errors") {
  const MfdConfig c;
  CHECK(c.train.lr == 1e-3);
  CHECK(c.train.epochs == 30);
  CHECK(c.train.beta == 0.5);
  CHECK(c.train.heads == 8);
  CHECK(c.train.batch_train == 512);
  CHECK(c.report.floor == 0.05);
  const auto r = MfdConfig::from_json({{"train", {{"epochs", 3}}}});
  CHECK(r.train.epochs == 3);
  CHECK(r.train.lr == 1e-3);
  CHECK(MfdConfig::from_json(c.to_json()).hash() == c.hash());
  CHECK(r.hash() != c.hash());

  auto field_of = [](const nlohmann::json& j) {
    try {
      MfdConfig::from_json(j);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of({{"train", {{"lr", "fast"}}}}) == "train.lr");
  CHECK(field_of({{"train", {{"lrr", 1}}}}) == "train.lrr");
  CHECK(field_of({{"train", {{"epochs", -1}}}}) == "train.epochs");
  CHECK(field_of({{"train", {{"epochs", 1.5}}}}) == "train.epochs");
  CHECK(field_of({{"train", {{"heads", 7}}}}) == "train.heads");
  CHECK(field_of({{"train", {{"alpha", 0}}}}) == "train.alpha");
  CHECK(field_of({{"model", {{"fusion", "sum"}}}}) == "model.fusion");
  CHECK(field_of({{"report", {{"bands", {0.5, 0.25, 0.75}}}}}) == "report.bands");
  CHECK(field_of({{"nope", {}}}) == "nope");
  CHECK(field_of({{"embedding", {{"provider", "remote"}}}}) == "embedding.url");
}

TEST_CASE("predictor training: descent, determinism, frozen head") {
  Rng rng(17);
  const ModelDims d = small_dims();
  std::vector<PreparedDoc> docs;
  for (int i = 0; i < 4; ++i) {
    PreparedDoc p{"d" + std::to_string(i), random_doc(d, 8, 2, rng), {}};
    for (int s = 0; s < 8; ++s) {
      const double v = p.inputs.low.at(s, 0) > 0 ? 0.9 : 0.05;
      p.labels.push_back({v, v, 0.05});
    }
    docs.push_back(std::move(p));
  }
  TrainConfig cfg;
  cfg.batch_train = 32;
  cfg.epochs = 8;
  cfg.step_size = 100;
  auto model = FusionModel::create(d, 4);
  const auto head_before = values(model.params().get("head.l1.w"));
  const auto r = train_predictor(model, docs, {}, cfg);
  for (std::size_t e = 1; e < 5; ++e) CHECK(r.history[e].loss < r.history[e - 1].loss);
  CHECK(values(model.params().get("head.l1.w")) == head_before);
  CHECK(model.params().get("head.l1.w").requires_grad());
  CHECK(r.steps == 8);

  auto again = FusionModel::create(d, 4);
  const auto r2 = train_predictor(again, docs, {}, cfg);
  CHECK(r2.to_json() == r.to_json());
  CHECK(values(again.params().get("mlp.l1.w")) == values(model.params().get("mlp.l1.w")));

  // With validation the best epoch's parameters are restored.
  auto with_val = FusionModel::create(d, 4);
  const auto rv = train_predictor(with_val, docs, {docs[0]}, cfg);
  REQUIRE(rv.best_val_mae);
  const auto now = regression_metrics(predict_all(with_val, {docs[0]}), docs[0].labels);
  CHECK(now.mean.mae == doctest::Approx(*rv.best_val_mae).epsilon(1e-12));

  TrainOptions capped;
  capped.max_steps = 3;
  auto m3 = FusionModel::create(d, 4);
  CHECK(train_predictor(m3, docs, {}, cfg, capped).steps == 3);
}
