#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mfd/config.hpp"
#include "mfd/corpus.hpp"

namespace mfd {

enum class Level { none, low, medium, high, very_high };

std::string_view to_string(Level level);
Level parse_level(std::string_view name);

// Bands the mean of the three scores: <= floor -> none, then (floor, b0] low,
// (b0, b1] medium, (b1, b2] high, above b2 very_high.
Level band_level(double mean_score, const ReportSection& bands);

struct SentenceReport {
  std::size_t index = 0;
  std::string text;
  InvolvementScores scores;
  Level level = Level::none;
};

struct DetectionReport {
  std::string document_id;
  std::vector<SentenceReport> sentences;
  InvolvementScores mean_scores;
  double fraction_above_floor = 0;
  ReportSection bands;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
  // Validates the schema; throws SchemaError(0, ...) on a malformed report.
  static DetectionReport from_json(const nlohmann::json& j);
};

DetectionReport build_report(const Document& doc, const std::vector<InvolvementScores>& scores,
                             const ReportSection& bands, nlohmann::json metadata = nlohmann::json::object());

// Standalone page with one highlighted span per sentence, shaded by level.
std::string render_html(const DetectionReport& report);

}  // namespace mfd
