// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-mfd> <source-dir>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "../common/golden_corpus.hpp"
#include "../common/gradcheck.hpp"
#include "mfd/annotate.hpp"
#include "mfd/authorstyle.hpp"
#include "mfd/contrastive.hpp"
#include "mfd/deep.hpp"
#include "mfd/eval.hpp"
#include "mfd/pipeline.hpp"
#include "mfd/readability.hpp"
#include "mfd/report.hpp"
#include "mfd/synth.hpp"

using namespace mfd;
using ad::Tensor;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

double lookup(const NamedValues& v, const std::string& name) {
  for (const auto& [k, x] : v)
    if (k == name) return x;
  return std::nan("");
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng) { return Tensor::matrix(r, c, random_vec(r * c, rng)); }

Tensor permute_rows(const Tensor& t, const std::vector<std::size_t>& perm) {
  const std::size_t cols = t.shape()[1];
  std::vector<double> out(perm.size() * cols);
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = t.at(perm[i], j);
  return Tensor::matrix(perm.size(), cols, out);
}

bool same_values(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

// ---- 1 ----
Outcome formula_oracles() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0;
  std::size_t checked = 0;
  for (const auto& s : golden::corpus()) {
    const auto ann = annotate(s.text);
    const auto r = readability_features(ann);
    o.require(r.size() == 15, "expected 15 readability indices");
    for (const auto& [name, want] : golden::readability(s)) {
      const double d = std::abs(lookup(r, name) - want);
      worst = std::isnan(d) ? INFINITY : std::max(worst, d);
      ++checked;
    }
    const auto a = authorstyle_features(ann);
    for (const auto& [name, want] : golden::authorstyle(s)) {
      const double d = std::abs(lookup(a, name) - want);
      worst = std::isnan(d) ? INFINITY : std::max(worst, d);
      ++checked;
    }
  }
  const double t = seconds_since(t0);
  o.require(worst <= 1e-9, "max |delta| " + fmt("%.3g", worst));
  o.require(t < 1.0, "runtime " + fmt("%.3f", t) + " s");
  o.detail = std::to_string(golden::corpus().size()) + " sentences, " + std::to_string(checked) +
             " values, max |delta| " + fmt("%.2g", worst) + ", " + fmt("%.3f", t) + " s" +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

// ---- 2 ----
double hinge_oracle(const PairDistances& d, double alpha) {
  double total = 0;
  for (double p : d.pos)
    for (double n : d.neg) total += std::max(0.0, p - n + alpha);
  return total;
}

Outcome loss_identities() {
  Outcome o;
  struct Fixture {
    PairDistances d;
    double expected;
    std::size_t hinges;
  };
  const std::vector<Fixture> fixtures = {
      {{{0.1, 0.1}, {0.5, 0.5, 0.5}}, 0.0, 0},
      {{{0.4, 0.4}, {0.2, 0.2, 0.2}}, 3.0, 6},
      {{{0.4, 0.1}, {0.2, 0.6, 0.6}}, 0.9, 4},
  };
  std::string values;
  for (const auto& f : fixtures) {
    const double got = twice_triplet_loss(f.d, 0.3);
    o.require(got == hinge_oracle(f.d, 0.3), "differs from the hinge oracle");
    o.require(std::abs(got - f.expected) <= 1e-15, "expected " + fmt("%g", f.expected) + ", got " + fmt("%.17g", got));
    o.require(active_hinges(f.d, 0.3) == f.hinges, "active hinge count");
    values += (values.empty() ? "" : ", ") + fmt("%g", got) + " (" + std::to_string(active_hinges(f.d, 0.3)) + " hinges)";
  }
  o.require(twice_triplet_loss(fixtures[0].d, 0.3) == 0.0, "margin-satisfied fixture is not 0");
  o.detail = values + (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

// ---- 3 ----
Outcome gradient_integrity() {
  Outcome o;
  const auto t0 = Clock::now();
  MfdConfig c;
  Pipeline pipeline(c);
  SynthConfig sc;
  sc.documents = 1;
  sc.sentences_per_doc = 6;
  sc.seed = 3;
  const auto docs = synth_corpus(sc);
  const auto norm = pipeline.fit_norm(docs);
  const auto doc = pipeline.prepare(docs[0], norm);
  const ModelDims dims = ModelDims::from_config(c, lowlevel_layout().width());
  auto model = FusionModel::create(dims, 9);
  // Targets strictly inside (0,1) so no output sits at a flat spot of the loss.
  std::vector<double> y;
  Rng rng(21);
  for (std::size_t i = 0; i < doc.inputs.sentences.shape()[0] * 3; ++i) y.push_back(rng.uniform(0.1, 0.9));
  const Tensor target = Tensor::matrix(doc.inputs.sentences.shape()[0], 3, y);
  auto loss = [&] { return joint_loss(model.forward(doc.inputs), target, 0.5).total; };

  // Stratified over the chain so every stage is probed.
  const std::vector<std::pair<std::string, int>> groups = {
      {"head.", 3}, {"deep.mhsa.", 4}, {"deep.ffn.", 3}, {"deep.ln", 2}, {"fusion.", 3}, {"mlp.", 3}, {"eval.", 2}};
  int checked = 0, failed = 0;
  double worst = 0;
  std::uint64_t seed = 100;
  for (const auto& [prefix, n] : groups) {
    std::vector<Tensor> params;
    for (const auto& [path, t] : model.params().entries())
      if (path.rfind(prefix, 0) == 0) params.push_back(t);
    if (params.empty()) {
      o.require(false, "no parameters under " + prefix);
      continue;
    }
    const auto r = testutil::gradcheck(loss, params, n, seed++);
    checked += r.checked;
    failed += r.failed;
    worst = std::max(worst, r.worst_rel);
    if (r.failed) o.require(false, prefix + " worst rel " + fmt("%.3g", r.worst_rel));
  }
  const double t = seconds_since(t0);
  o.require(checked == 20, "checked " + std::to_string(checked) + " coordinates");
  o.require(t < 30.0, "runtime " + fmt("%.1f", t) + " s");
  o.detail = std::to_string(checked) + " coords, " + std::to_string(failed) + " failed, worst rel " + fmt("%.2g", worst) +
             ", d_model " + std::to_string(dims.d_model) + ", " + fmt("%.1f", t) + " s" +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

// ---- 4 ----
Outcome attention_invariants() {
  Outcome o;
  Rng rng(404);
  ad::ParamStore store;
  const std::size_t d = 16;
  const auto stack = AnalysisStack::create(store, d, 4, 32, rng);
  const auto cross = CrossAttender::create(store, d, false, false, rng);
  double worst_row = 0;
  int perm_exact = 0, single_exact = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(6), rows = 2 + rng.below(7);
    const Tensor queries = random_matrix(n, d, rng);
    const Tensor analysis = random_matrix(rows, d, rng);
    const Tensor e_star = stack.refine(store, analysis);

    const auto w = cross.weights(store, queries, e_star);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < rows; ++j) s += w[i * rows + j];
      worst_row = std::max(worst_row, std::abs(s - 1.0));
    }

    std::vector<std::size_t> perm(rows);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = rows - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    const Tensor f = cross.attend(store, queries, e_star);
    const bool over_e_star = same_values(f, cross.attend(store, queries, permute_rows(e_star, perm)));
    // Without positional encoding the stack is row-equivariant, so f_deep is unchanged end to end.
    const Tensor refined_perm = stack.refine(store, permute_rows(analysis, perm));
    const bool through_stack = same_values(refined_perm, permute_rows(e_star, perm)) &&
                               same_values(f, cross.attend(store, queries, refined_perm));
    perm_exact += over_e_star && through_stack;

    const Tensor key = random_matrix(1, d, rng);
    const Tensor single = cross.attend(store, queries, key);
    bool exact = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) exact &= single.at(i, j) == key.at(0, j);
    single_exact += exact;
  }
  o.require(worst_row <= 1e-9, "row sum deviation " + fmt("%.3g", worst_row));
  o.require(perm_exact == 50, std::to_string(50 - perm_exact) + " permutation fixtures differ");
  o.require(single_exact == 50, std::to_string(50 - single_exact) + " single-key fixtures differ");
  o.detail = "max |row sum - 1| " + fmt("%.2g", worst_row) + ", permutation exact " + std::to_string(perm_exact) +
             "/50, single key exact " + std::to_string(single_exact) + "/50" + (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

// ---- 5 ----
Outcome overfit_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  SynthConfig sc;
  sc.documents = 4;
  sc.sentences_per_doc = 8;
  sc.seed = 7;
  const auto docs = synth_corpus(sc);
  MfdConfig c;
  c.train.batch_train = 32;
  c.train.epochs = 500;
  c.train.step_size = 1000;
  Pipeline p(c);
  const auto [llm, human] = contrastive_texts(docs);
  const auto head = run_contrastive_stage(p, llm, human);
  const auto st = run_predictor_stage(p, docs, {}, &head.head_params);
  const auto labels = labels_of(st.train_docs);
  const auto m = regression_metrics(predict_all(*st.model, st.train_docs), labels, 0.5);
  const double t = seconds_since(t0);
  o.require(labels.size() == 32, "fixture has " + std::to_string(labels.size()) + " samples");
  o.require(st.train.steps == 500, std::to_string(st.train.steps) + " optimizer steps");
  o.require(m.mean.mae < 0.05, "train MAE " + fmt("%.4f", m.mean.mae));
  o.require(m.mean.accuracy == 1.0, "train accuracy " + fmt("%.4f", m.mean.accuracy));
  o.require(t < 120.0, "runtime " + fmt("%.1f", t) + " s");
  o.detail = std::to_string(labels.size()) + " samples, " + std::to_string(st.train.steps) + " steps, MAE " +
             fmt("%.4f", m.mean.mae) + ", accuracy " + fmt("%.4f", m.mean.accuracy) + ", " + fmt("%.1f", t) + " s" +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

// ---- 6 ----
Outcome learning_signal(const fs::path& source_dir) {
  Outcome o;
  const auto t0 = Clock::now();
  SynthConfig sc;
  sc.documents = 64;
  sc.sentences_per_doc = 8;
  sc.seed = 11;
  const auto docs = synth_corpus(sc);
  const auto c = MfdConfig::load(source_dir / "config" / "desk.json");
  const auto split = split_dataset(docs, {0.75, 0.125, 0.125}, 11);
  Pipeline p(c);
  const auto [llm, human] = contrastive_texts(split.train);
  const auto head = run_contrastive_stage(p, llm, human);
  const auto st = run_predictor_stage(p, split.train, split.val, &head.head_params);
  const auto test = p.prepare_all(split.test, st.norm);
  const auto labels = labels_of(test);
  const auto m = regression_metrics(predict_all(*st.model, test), labels);
  const auto base = regression_metrics(std::vector<InvolvementScores>(labels.size(), {0.5, 0.5, 0.5}), labels);
  const double rel = 1.0 - m.mean.mae / base.mean.mae;
  const double t = seconds_since(t0);
  std::size_t total = 0;
  for (const auto& d : docs) total += d.size();
  o.require(total == 512, "corpus has " + std::to_string(total) + " samples");
  o.require(labels.size() == 64, "held-out split has " + std::to_string(labels.size()) + " samples");
  o.require(rel >= 0.30, "relative improvement " + fmt("%.3f", rel));
  o.require(t < 600.0, "runtime " + fmt("%.1f", t) + " s");
  o.detail = "test MAE " + fmt("%.4f", m.mean.mae) + " vs constant " + fmt("%.4f", base.mean.mae) + " (" +
             fmt("%.1f", 100 * rel) + "% better), n=" + std::to_string(labels.size()) + ", " + fmt("%.1f", t) + " s" +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

// ---- 7 ----
Outcome metric_correctness() {
  Outcome o;
  {
    const std::vector<double> p = {0.2, 0.4}, l = {0.0, 0.4};
    const auto m = dimension_metrics(p, l);
    const double mae = (std::abs(p[0] - l[0]) + std::abs(p[1] - l[1])) / 2;
    const double mse = ((p[0] - l[0]) * (p[0] - l[0]) + (p[1] - l[1]) * (p[1] - l[1])) / 2;
    o.require(m.mae == mae && m.mse == mse && m.rmse == std::sqrt(mse), "hand-arithmetic oracle");
    o.require(std::abs(m.mae - 0.1) <= 1e-15 && std::abs(m.mse - 0.02) <= 1e-15 &&
                  std::abs(m.rmse - 0.1414) < 1e-4,
              "fixture values 0.1 / 0.02 / 0.1414");
    const std::vector<double> p2 = {0.6, 0.3}, l2 = {0.9, 0.1};
    o.require(dimension_metrics(p2, l2, 0.5).accuracy == 1.0, "binarized accuracy fixture");
    const std::vector<InvolvementScores> v = {{0.1, 0.7, 0.3}, {0.9, 0.2, 0.5}};
    const auto r = regression_metrics(v, v);
    o.require(r.mean.mae == 0 && r.mean.mse == 0 && r.mean.rmse == 0 && r.mean.accuracy == 1, "preds = labels");
  }
  int ordered = 0;
  Rng rng(707);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<InvolvementScores> p, l;
    for (std::size_t i = 0; i < n; ++i) {
      p.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
      l.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    }
    const auto r = regression_metrics(p, l);
    bool ok = r.mean.mae <= r.mean.rmse;
    for (const auto& d : r.dims) ok &= d.mae <= d.rmse;
    ordered += ok;
  }
  o.require(ordered == 100, std::to_string(100 - ordered) + " random fixtures with MAE > RMSE");
  const std::vector<InvolvementScores> preds(6, {0.6, 0.6, 0.6}), labels(6, {1.0, 1.0, 1.0});
  const auto rows = threshold_sweep(preds, labels, {0.5, 0.7});
  const bool step = rows.size() == 2 && rows[0].mean == 1.0 && rows[1].mean == 0.0 &&
                    rows[0].accuracy == std::array<double, 3>{1, 1, 1} &&
                    rows[1].accuracy == std::array<double, 3>{0, 0, 0};
  o.require(step, "step-behavior sweep");
  o.detail = "hand fixtures exact, MAE <= RMSE on " + std::to_string(ordered) + "/100, sweep theta 0.5 -> " +
             (rows.size() == 2 ? fmt("%g", rows[0].mean) + ", 0.7 -> " + fmt("%g", rows[1].mean) : "?") +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

// ---- 8, 9, 10 drive the CLI ----
struct CliContext {
  std::string mfd;
  fs::path source, work;
  std::string desk() const { return "--config " + q(source / "config" / "desk.json"); }
};

// One full cycle of commands in `dir`, with its own cache.
bool cli_cycle(const CliContext& ctx, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string g = ctx.mfd + " " + ctx.desk() + " --offline --cache-dir " + q(dir / "cache") + " ";
  const std::string log = " > " + q(dir / "log.txt") + " 2>&1";
  return run(g + "synth --documents 24 --output " + q(dir / "all.jsonl") + " --split-dir " + q(dir / "splits") + log) == 0 &&
         run(g + "train-contrastive --dataset " + q(dir / "splits" / "train.jsonl") + " --output " + q(dir / "head.ckpt") +
             " --quadruples " + q(dir / "quads.jsonl") + log) == 0 &&
         run(g + "train --dataset " + q(dir / "splits" / "train.jsonl") + " --val " + q(dir / "splits" / "val.jsonl") +
             " --head " + q(dir / "head.ckpt") + " --output " + q(dir / "model.ckpt") + " --metrics " +
             q(dir / "train.json") + log) == 0 &&
         run(g + "evaluate --model " + q(dir / "model.ckpt") + " --dataset " + q(dir / "splits" / "test.jsonl") +
             " --sweep 0.3,0.5,0.7 --sweep-csv " + q(dir / "sweep.csv") + " --output " + q(dir / "eval.json") + log) == 0 &&
         run(g + "detect --model " + q(dir / "model.ckpt") + " --input " + q(ctx.source / "data" / "sample_mixed.txt") +
             " --output " + q(dir / "detect.json") + " --html " + q(dir / "detect.html") + log) == 0;
}

Outcome determinism(const CliContext& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  // Both runs use the same paths (artifacts echo their inputs), each starting from an empty cache.
  const fs::path cycle = ctx.work / "cycle", a = ctx.work / "run_a", b = ctx.work / "run_b";
  o.require(cli_cycle(ctx, cycle), "first run failed (see " + (cycle / "log.txt").string() + ")");
  fs::rename(cycle, a);
  o.require(cli_cycle(ctx, cycle), "second run failed (see " + (cycle / "log.txt").string() + ")");
  fs::rename(cycle, b);
  fs::rename(a, cycle);
  // Rerun the trainer against the first run's cache, which is now warm.
  const std::string g = ctx.mfd + " " + ctx.desk() + " --offline --cache-dir " + q(cycle / "cache") + " ";
  o.require(run(g + "train --dataset " + q(cycle / "splits" / "train.jsonl") + " --val " +
                q(cycle / "splits" / "val.jsonl") + " --head " + q(cycle / "head.ckpt") + " --output " +
                q(cycle / "model_warm.ckpt") + " --metrics " + q(cycle / "train_warm.json") + " > /dev/null 2>&1") == 0,
            "warm-cache rerun failed");
  fs::rename(cycle, a);
  const std::vector<std::string> artifacts = {"all.jsonl", "quads.jsonl", "head.ckpt",  "model.ckpt", "train.json",
                                              "train.csv", "eval.json",   "sweep.csv",  "detect.json", "detect.html"};
  int identical = 0;
  for (const auto& name : artifacts) {
    const auto x = slurp(a / name), y = slurp(b / name);
    const bool same = !x.empty() && x == y;
    identical += same;
    if (!same) o.require(false, name + " differs");
  }
  const bool warm = slurp(a / "model.ckpt") == slurp(a / "model_warm.ckpt") &&
                    slurp(a / "train.json") == slurp(a / "train_warm.json");
  o.require(warm, "warm-cache rerun differs");
  const double t = seconds_since(t0);
  o.detail = std::to_string(identical) + "/" + std::to_string(artifacts.size()) +
             " artifacts byte-identical across runs, warm-cache retrain " + (warm ? "identical" : "differs") + ", " +
             fmt("%.1f", t) + " s" + (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome ablation_parity(const CliContext& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  const fs::path dir = ctx.work / "ablate";
  fs::create_directories(dir);
  const std::string g = ctx.mfd + " " + ctx.desk() + " --offline --cache-dir " + q(dir / "cache") + " ";
  const std::string log = " > " + q(dir / "log.txt") + " 2>&1";
  const bool ok = run(g + "synth --documents 64 --sentences 8 --output " + q(dir / "corpus.jsonl") + log) == 0 &&
                  run(g + "ablate --dataset " + q(dir / "corpus.jsonl") + " --output " + q(dir / "ablation.json") +
                      " --markdown " + q(dir / "ablation.md") + " --csv " + q(dir / "ablation.csv") + log) == 0;
  o.require(ok, "ablate failed (see " + (dir / "log.txt").string() + ")");
  std::size_t sentences = 0;
  {
    std::istringstream in(slurp(dir / "corpus.jsonl"));
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) sentences += nlohmann::json::parse(line).at("labels").size();
  }
  o.require(sentences == 512, "corpus has " + std::to_string(sentences) + " samples");
  std::vector<std::string> variants;
  try {
    const auto j = nlohmann::json::parse(slurp(dir / "ablation.json"));
    for (const auto& row : j.at("rows")) {
      variants.push_back(row.at("variant").get<std::string>());
      o.require(row.at("test").at("mean").at("mae").is_number(), "row without test MAE");
    }
  } catch (const std::exception& e) {
    o.require(false, std::string("ablation JSON: ") + e.what());
  }
  const std::vector<std::string> expected = {"full", "no_low", "no_high", "no_deep"};
  o.require(variants == expected, "variants do not match full/no_low/no_high/no_deep");
  const auto md = slurp(dir / "ablation.md");
  for (const auto& v : expected) o.require(md.find("| " + v) != std::string::npos, "table lacks " + v);
  const auto csv = slurp(dir / "ablation.csv");
  o.require(std::count(csv.begin(), csv.end(), '\n') >= 5, "CSV has fewer than 5 lines");
  const double t = seconds_since(t0);
  o.detail = std::to_string(sentences) + " samples, " + std::to_string(variants.size()) + " variants, table " +
             (md.empty() ? "missing" : "written") + ", " + fmt("%.1f", t) + " s" +
             (o.detail.empty() ? "" : " | " + o.detail);
  if (!md.empty()) std::printf("%s", md.c_str());
  return o;
}

Outcome cli_detect(const CliContext& ctx) {
  Outcome o;
  const fs::path dir = ctx.work / "detect";
  fs::create_directories(dir);
  const fs::path model = ctx.work / "run_a" / "model.ckpt";  // trained during C8
  const int code = run(ctx.mfd + " --offline --cache-dir " + q(dir / "cache") + " detect --model " + q(model) +
                       " --input " + q(ctx.source / "data" / "sample_mixed.txt") + " --output " + q(dir / "report.json") +
                       " --html " + q(dir / "report.html") + " 2> " + q(dir / "stderr.txt"));
  o.require(code == 0, "exit code " + std::to_string(code));
  std::size_t n = 0, banded = 0, none = 0;
  try {
    const auto report = DetectionReport::from_json(nlohmann::json::parse(slurp(dir / "report.json")));
    n = report.sentences.size();
    o.require(report.bands.floor == 0.05, "floor " + fmt("%g", report.bands.floor));
    for (const auto& s : report.sentences) {
      const double mean = (s.scores.lex + s.scores.gram + s.scores.syn) / 3.0;
      const bool consistent = s.level == band_level(mean, report.bands) && ((s.level == Level::none) == (mean <= 0.05));
      banded += consistent;
      none += s.level == Level::none;
    }
  } catch (const std::exception& e) {
    o.require(false, std::string("invalid report: ") + e.what());
  }
  o.require(n == 12, std::to_string(n) + " sentences in the report");
  o.require(banded == n, std::to_string(n - banded) + " sentences banded inconsistently");
  const auto html = slurp(dir / "report.html");
  std::size_t spans = 0;
  for (auto p = html.find("<span "); p != std::string::npos; p = html.find("<span ", p + 1)) ++spans;
  o.require(spans == 12, std::to_string(spans) + " spans in the HTML");
  o.detail = "exit " + std::to_string(code) + ", " + std::to_string(n) + " sentences, " + std::to_string(spans) +
             " spans, " + std::to_string(banded) + " banded correctly (" + std::to_string(none) + " below the floor)" +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <mfd> <source-dir>\n");
    return 2;
  }
  CliContext ctx{q(fs::absolute(argv[1])), fs::absolute(argv[2]),
                 fs::temp_directory_path() / ("mfd-acceptance-" + std::to_string(::getpid()))};
  fs::remove_all(ctx.work);
  fs::create_directories(ctx.work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 formula oracles", formula_oracles},
      {"C2 loss identities", loss_identities},
      {"C3 gradient integrity", gradient_integrity},
      {"C4 attention invariants", attention_invariants},
      {"C5 overfit oracle", overfit_oracle},
      {"C6 desk-scale learning signal", [&] { return learning_signal(ctx.source); }},
      {"C7 metric correctness", metric_correctness},
      {"C8 determinism", [&] { return determinism(ctx); }},
      {"C9 ablation harness", [&] { return ablation_parity(ctx); }},
      {"C10 end-to-end detect", [&] { return cli_detect(ctx); }},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  if (failures == 0) fs::remove_all(ctx.work);
  return failures == 0 ? 0 : 1;
}
