#include "mfd/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mfd/error.hpp"

namespace mfd {

using nlohmann::json;

json DimMetrics::to_json() const {
  return {{"mae", mae}, {"mse", mse}, {"rmse", rmse}, {"accuracy", accuracy}};
}

json MetricReport::to_json() const {
  json j = json::object();
  for (std::size_t d = 0; d < 3; ++d) j[std::string(kDimensionNames[d])] = dims[d].to_json();
  j["mean"] = mean.to_json();
  j["n_sentences"] = n_sentences;
  j["threshold"] = threshold;
  return j;
}

DimMetrics dimension_metrics(std::span<const double> preds, std::span<const double> labels, double threshold) {
  if (preds.size() != labels.size()) {
    throw LengthMismatch("predictions (" + std::to_string(preds.size()) + ") and labels (" +
                         std::to_string(labels.size()) + ") differ in length");
  }
  if (preds.empty()) throw LengthMismatch("metrics need at least one sentence");
  double abs_sum = 0, sq_sum = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double e = preds[i] - labels[i];
    abs_sum += std::fabs(e);
    sq_sum += e * e;
    correct += (preds[i] >= threshold) == (labels[i] >= threshold);
  }
  const double n = static_cast<double>(preds.size());
  DimMetrics m;
  m.mae = abs_sum / n;
  m.mse = sq_sum / n;
  m.rmse = std::sqrt(m.mse);
  m.accuracy = static_cast<double>(correct) / n;
  return m;
}

namespace {

std::array<std::vector<double>, 3> columns(const std::vector<InvolvementScores>& v) {
  std::array<std::vector<double>, 3> c;
  for (auto& col : c) col.reserve(v.size());
  for (const auto& s : v) {
    c[0].push_back(s.lex);
    c[1].push_back(s.gram);
    c[2].push_back(s.syn);
  }
  return c;
}

}  // namespace

MetricReport regression_metrics(const std::vector<InvolvementScores>& preds,
                                const std::vector<InvolvementScores>& labels, double threshold) {
  if (preds.size() != labels.size()) {
    throw LengthMismatch("predictions (" + std::to_string(preds.size()) + ") and labels (" +
                         std::to_string(labels.size()) + ") differ in length");
  }
  const auto p = columns(preds), l = columns(labels);
  MetricReport r;
  r.n_sentences = preds.size();
  r.threshold = threshold;
  for (std::size_t d = 0; d < 3; ++d) r.dims[d] = dimension_metrics(p[d], l[d], threshold);
  const auto& k = r.dims;
  r.mean.mae = (k[0].mae + k[1].mae + k[2].mae) / 3.0;
  r.mean.mse = (k[0].mse + k[1].mse + k[2].mse) / 3.0;
  r.mean.rmse = (k[0].rmse + k[1].rmse + k[2].rmse) / 3.0;
  r.mean.accuracy = (k[0].accuracy + k[1].accuracy + k[2].accuracy) / 3.0;
  return r;
}

std::vector<SweepRow> threshold_sweep(const std::vector<InvolvementScores>& preds,
                                      const std::vector<InvolvementScores>& labels,
                                      const std::vector<double>& thresholds) {
  std::vector<SweepRow> rows;
  for (double t : thresholds) {
    if (!(t > 0 && t < 1)) throw PreconditionError("sweep thresholds must lie in (0,1)");
    const MetricReport r = regression_metrics(preds, labels, t);
    rows.push_back({t, {r.dims[0].accuracy, r.dims[1].accuracy, r.dims[2].accuracy}, r.mean.accuracy});
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "threshold,lex,gram,syn,mean\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%.17g,%.17g,%.17g,%.17g\n", r.threshold, r.accuracy[0], r.accuracy[1],
                  r.accuracy[2], r.mean);
    out << buf;
  }
  return out.str();
}

json sweep_to_series(const std::vector<SweepRow>& rows) {
  json j = {{"threshold", json::array()}, {"lex", json::array()}, {"gram", json::array()},
            {"syn", json::array()},       {"mean", json::array()}};
  for (const auto& r : rows) {
    j["threshold"].push_back(r.threshold);
    j["lex"].push_back(r.accuracy[0]);
    j["gram"].push_back(r.accuracy[1]);
    j["syn"].push_back(r.accuracy[2]);
    j["mean"].push_back(r.mean);
  }
  return j;
}

MetricReport binary_generalization_eval(const std::vector<InvolvementScores>& preds,
                                        const std::vector<InvolvementScores>& labels, double threshold) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (double v : labels[i].as_array()) {
      if (v != 0.0 && v != 1.0) {
        throw NonBinaryLabels("label " + std::to_string(v) + " at sentence " + std::to_string(i) +
                              " is not 0 or 1");
      }
    }
  }
  return regression_metrics(preds, labels, threshold);
}

std::vector<InvolvementScores> collect_labels(const std::vector<Document>& docs) {
  std::vector<InvolvementScores> out;
  for (const auto& d : docs) {
    for (const auto& s : d.sentences()) {
      if (!s.labels) throw DatasetError("document " + d.id() + " has an unlabeled sentence");
      out.push_back(*s.labels);
    }
  }
  return out;
}

}  // namespace mfd
