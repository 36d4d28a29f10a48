#include <doctest.h>

#include <cmath>

#include "mfd/error.hpp"
#include "mfd/eval.hpp"
#include "mfd/random.hpp"
#include "mfd/report.hpp"
#include "mfd/synth.hpp"

using namespace mfd;

namespace {

InvolvementScores same(double v) { return {v, v, v}; }

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("metric hand-arithmetic fixtures") {
  const std::vector<double> p = {0.2, 0.4}, l = {0.0, 0.4};
  const auto m = dimension_metrics(p, l);
  CHECK(m.mae == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(m.mse == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(m.rmse == doctest::Approx(std::sqrt(0.02)).epsilon(1e-15));

  const std::vector<double> p2 = {0.6, 0.3}, l2 = {0.9, 0.1};
  CHECK(dimension_metrics(p2, l2, 0.5).accuracy == 1.0);

  const std::vector<InvolvementScores> v = {{0.1, 0.7, 0.3}, {0.9, 0.2, 0.5}};
  const auto r = regression_metrics(v, v);
  for (const auto& d : r.dims) {
    CHECK(d.mae == 0.0);
    CHECK(d.mse == 0.0);
    CHECK(d.rmse == 0.0);
    CHECK(d.accuracy == 1.0);
  }
  CHECK(r.n_sentences == 2);
  CHECK_THROWS_AS(regression_metrics(v, {v[0]}), LengthMismatch);
  CHECK_THROWS_AS(regression_metrics({}, {}), LengthMismatch);
}

TEST_CASE("metric properties on random fixtures") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<InvolvementScores> p, l;
    for (std::size_t i = 0; i < n; ++i) {
      p.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
      l.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    }
    const auto r = regression_metrics(p, l);
    for (const auto& d : r.dims) {
      CHECK(d.mae <= d.rmse + 1e-15);
      CHECK(std::abs(d.rmse - std::sqrt(d.mse)) <= 1e-12);
      CHECK((d.accuracy >= 0 && d.accuracy <= 1));
    }
    CHECK(std::abs(r.mean.mae - (r.dims[0].mae + r.dims[1].mae + r.dims[2].mae) / 3) <= 1e-12);
    CHECK(std::abs(r.mean.accuracy - (r.dims[0].accuracy + r.dims[1].accuracy + r.dims[2].accuracy) / 3) <= 1e-12);
    // A strictly monotone map fixing the threshold keeps every crossing.
    std::vector<InvolvementScores> cubed;
    for (const auto& s : p) {
      auto f = [](double x) { return 0.5 + 4.0 * std::pow(x - 0.5, 3); };
      cubed.push_back({f(s.lex), f(s.gram), f(s.syn)});
    }
    CHECK(regression_metrics(cubed, l).mean.accuracy == r.mean.accuracy);
  }
}

TEST_CASE("threshold sweep") {
  const std::vector<InvolvementScores> p(5, same(0.6)), l(5, same(1.0));
  const auto rows = threshold_sweep(p, l, {0.5, 0.7});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean == 1.0);
  CHECK(rows[1].mean == 0.0);
  CHECK(rows[1].accuracy == std::array<double, 3>{0, 0, 0});

  // Equal predictions and labels: accuracy 1 at every threshold.
  const std::vector<InvolvementScores> v = {same(0.15), same(0.45), same(0.85)};
  for (const auto& r : threshold_sweep(v, v, {0.1, 0.3, 0.5, 0.7, 0.9})) CHECK(r.mean == 1.0);

  // Labels all 1, predictions 0.1..0.9: each step up in θ flips exactly one sentence.
  std::vector<InvolvementScores> preds, ones;
  for (int i = 1; i <= 9; ++i) {
    preds.push_back(same(i / 10.0));
    ones.push_back(same(1.0));
  }
  const auto steps = threshold_sweep(preds, ones, {0.15, 0.25, 0.35, 0.45, 0.55});
  for (std::size_t i = 1; i < steps.size(); ++i) CHECK(steps[i - 1].mean - steps[i].mean == doctest::Approx(1.0 / 9));
  CHECK(steps[0].mean == doctest::Approx(8.0 / 9));

  CHECK_THROWS_AS(threshold_sweep(p, l, {0.0}), PreconditionError);
  CHECK_THROWS_AS(threshold_sweep(p, l, {1.0}), PreconditionError);
  const auto csv = sweep_to_csv(rows);
  CHECK(count(csv, "\n") == 3);
  CHECK(csv.rfind("threshold,lex,gram,syn,mean\n0.5,1,1,1,1\n", 0) == 0);
  const auto series = sweep_to_series(rows);
  CHECK(series["threshold"].size() == 2);
  CHECK(series["mean"][1].get<double>() == 0.0);
}

TEST_CASE("binary generalization eval") {
  const std::vector<InvolvementScores> labels = {same(1), same(0), {1, 0, 1}, {0, 1, 0}};
  const auto perfect = binary_generalization_eval(labels, labels);
  for (const auto& d : perfect.dims) CHECK(d.accuracy == 1.0);
  CHECK(perfect.mean.accuracy == 1.0);
  const auto half = binary_generalization_eval(std::vector<InvolvementScores>(4, same(0.5)), labels);
  CHECK(half.mean.accuracy == 0.5);
  CHECK_THROWS_AS(binary_generalization_eval(labels, {same(1), same(0), same(0.3), same(1)}), NonBinaryLabels);
}

TEST_CASE("level banding") {
  const ReportSection b;
  CHECK(band_level(0.0, b) == Level::none);
  CHECK(band_level(0.03, b) == Level::none);
  CHECK(band_level(0.05, b) == Level::none);
  CHECK(band_level(0.0500001, b) == Level::low);
  CHECK(band_level(0.25, b) == Level::low);
  CHECK(band_level(0.26, b) == Level::medium);
  CHECK(band_level(0.5, b) == Level::medium);
  CHECK(band_level(0.75, b) == Level::high);
  CHECK(band_level(0.76, b) == Level::very_high);
  CHECK(band_level(1.0, b) == Level::very_high);
}

TEST_CASE("detection report JSON round trip and HTML spans") {
  const Document doc("doc", {{"Plain <one>.", 0, {}}, {"Second & last.", 1, {}}, {"Third.", 2, {}}});
  const std::vector<InvolvementScores> s = {same(0.03), {0.9, 0.8, 0.7}, {0.2, 0.3, 0.4}};
  const auto r = build_report(doc, s, ReportSection{}, {{"seed", 42}});
  CHECK(r.sentences[0].level == Level::none);
  CHECK(r.sentences[1].level == Level::very_high);
  CHECK(r.sentences[2].level == Level::medium);
  CHECK(r.fraction_above_floor == doctest::Approx(2.0 / 3));
  const auto j = r.to_json();
  const auto back = DetectionReport::from_json(j);
  CHECK(back.to_json() == j);
  const auto html = render_html(r);
  CHECK(count(html, "<span ") == 3);
  CHECK(html.find("Plain &lt;one&gt;.") != std::string::npos);
  CHECK(html.find("Second &amp; last.") != std::string::npos);

  auto tampered = j;
  tampered["sentences"][0]["level"] = "high";
  CHECK_THROWS_AS(DetectionReport::from_json(tampered), SchemaError);
  auto broken = j;
  broken.erase("summary");
  CHECK_THROWS_AS(DetectionReport::from_json(broken), SchemaError);
  CHECK_THROWS_AS(build_report(doc, {same(0.1)}, ReportSection{}), LengthMismatch);
}

TEST_CASE("synthetic corpus is deterministic and labeled") {
  SynthConfig c;
  c.documents = 6;
  const auto a = synth_corpus(c), b = synth_corpus(c);
  CHECK(a == b);
  std::size_t involved = 0, n = 0;
  for (const auto& d : a) {
    CHECK(d.size() == c.sentences_per_doc);
    for (const auto& s : d.sentences()) {
      REQUIRE(s.labels);
      for (double v : s.labels->as_array()) CHECK((v == 0.0 || v >= 0.6));
      involved += s.labels->mean() > 0;
      ++n;
    }
  }
  CHECK(involved > 0);
  CHECK(involved < n);
  c.seed = 43;
  CHECK(synth_corpus(c) != a);
}
