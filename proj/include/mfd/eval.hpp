#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/corpus.hpp"

namespace mfd {

struct DimMetrics {
  double mae = 0, mse = 0, rmse = 0, accuracy = 0;
  nlohmann::json to_json() const;
};

struct MetricReport {
  std::array<DimMetrics, 3> dims;  // lex, gram, syn
  DimMetrics mean;                 // arithmetic mean of the three
  std::size_t n_sentences = 0;
  double threshold = 0.5;

  nlohmann::json to_json() const;
};

// Binarization: value >= threshold -> 1.
DimMetrics dimension_metrics(std::span<const double> preds, std::span<const double> labels,
                             double threshold = 0.5);
MetricReport regression_metrics(const std::vector<InvolvementScores>& preds,
                                const std::vector<InvolvementScores>& labels, double threshold = 0.5);

struct SweepRow {
  double threshold = 0;
  std::array<double, 3> accuracy{};
  double mean = 0;
};

// Thresholds must lie in (0,1).
std::vector<SweepRow> threshold_sweep(const std::vector<InvolvementScores>& preds,
                                      const std::vector<InvolvementScores>& labels,
                                      const std::vector<double>& thresholds);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
// {"threshold": [...], "lex": [...], "gram": [...], "syn": [...], "mean": [...]}
nlohmann::json sweep_to_series(const std::vector<SweepRow>& rows);

// Labels must be exactly 0 or 1 (NonBinaryLabels otherwise).
MetricReport binary_generalization_eval(const std::vector<InvolvementScores>& preds,
                                        const std::vector<InvolvementScores>& labels,
                                        double threshold = 0.5);

// Gathers every labeled sentence's labels in document order.
std::vector<InvolvementScores> collect_labels(const std::vector<Document>& docs);

}  // namespace mfd
