#include "mfd/report.hpp"

#include <cstdio>
#include <sstream>

#include "mfd/error.hpp"

namespace mfd {

using nlohmann::json;

namespace {
constexpr std::string_view kLevelNames[] = {"none", "low", "medium", "high", "very_high"};
}

std::string_view to_string(Level level) { return kLevelNames[static_cast<int>(level)]; }

Level parse_level(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kLevelNames[i] == name) return static_cast<Level>(i);
  }
  throw SchemaError(0, "unknown level '" + std::string(name) + "'");
}

Level band_level(double m, const ReportSection& b) {
  if (m <= b.floor) return Level::none;
  if (m <= b.bands[0]) return Level::low;
  if (m <= b.bands[1]) return Level::medium;
  if (m <= b.bands[2]) return Level::high;
  return Level::very_high;
}

json DetectionReport::to_json() const {
  json s = json::array();
  for (const auto& r : sentences) {
    s.push_back({{"index", r.index},
                 {"text", r.text},
                 {"scores", {{"lex", r.scores.lex}, {"gram", r.scores.gram}, {"syn", r.scores.syn}}},
                 {"mean", r.scores.mean()},
                 {"level", to_string(r.level)}});
  }
  return {{"document_id", document_id},
          {"sentences", std::move(s)},
          {"summary",
           {{"mean_scores", {{"lex", mean_scores.lex}, {"gram", mean_scores.gram}, {"syn", mean_scores.syn}}},
            {"fraction_above_floor", fraction_above_floor},
            {"floor", bands.floor},
            {"bands", bands.bands}}},
          {"metadata", metadata}};
}

DetectionReport DetectionReport::from_json(const json& j) {
  auto scores = [](const json& s) {
    for (const char* k : {"lex", "gram", "syn"}) {
      const double v = s.at(k).get<double>();
      if (!(v >= 0 && v <= 1)) throw SchemaError(0, std::string("score ") + k + " outside [0,1]");
    }
    return InvolvementScores{s.at("lex").get<double>(), s.at("gram").get<double>(), s.at("syn").get<double>()};
  };
  try {
    DetectionReport r;
    r.document_id = j.at("document_id").get<std::string>();
    const json& summary = j.at("summary");
    r.bands.floor = summary.at("floor").get<double>();
    r.bands.bands = summary.at("bands").get<std::vector<double>>();
    if (r.bands.bands.size() != 3) throw SchemaError(0, "expected three band edges");
    r.mean_scores = scores(summary.at("mean_scores"));
    r.fraction_above_floor = summary.at("fraction_above_floor").get<double>();
    for (const auto& s : j.at("sentences")) {
      SentenceReport sr;
      sr.index = s.at("index").get<std::size_t>();
      sr.text = s.at("text").get<std::string>();
      sr.scores = scores(s.at("scores"));
      sr.level = parse_level(s.at("level").get<std::string>());
      if (sr.level != band_level(sr.scores.mean(), r.bands)) {
        throw SchemaError(0, "sentence " + std::to_string(sr.index) + " level disagrees with its scores");
      }
      r.sentences.push_back(std::move(sr));
    }
    r.metadata = j.value("metadata", json::object());
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(0, std::string("malformed report: ") + e.what());
  }
}

DetectionReport build_report(const Document& doc, const std::vector<InvolvementScores>& scores,
                             const ReportSection& bands, json metadata) {
  if (scores.size() != doc.size()) throw LengthMismatch("one score triple per sentence expected");
  DetectionReport r;
  r.document_id = doc.id();
  r.bands = bands;
  r.metadata = std::move(metadata);
  std::size_t above = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    const Level level = band_level(s.mean(), bands);
    above += level != Level::none;
    r.mean_scores.lex += s.lex;
    r.mean_scores.gram += s.gram;
    r.mean_scores.syn += s.syn;
    r.sentences.push_back({doc.sentences()[i].index, doc.sentences()[i].text, s, level});
  }
  if (!scores.empty()) {
    const double n = static_cast<double>(scores.size());
    r.mean_scores = {r.mean_scores.lex / n, r.mean_scores.gram / n, r.mean_scores.syn / n};
    r.fraction_above_floor = static_cast<double>(above) / n;
  }
  return r;
}

namespace {

std::string escape_html(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_html(const DetectionReport& r) {
  std::ostringstream o;
  o << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
    << "<title>LLM involvement: " << escape_html(r.document_id) << "</title>\n<style>\n"
    << "body { font-family: Georgia, serif; max-width: 48rem; margin: 2rem auto; line-height: 1.7; }\n"
    << ".mfd-sentence { padding: 0.1rem 0.15rem; border-radius: 0.2rem; }\n"
    << ".level-none { background: transparent; }\n"
    << ".level-low { background: rgba(230, 80, 60, 0.15); }\n"
    << ".level-medium { background: rgba(230, 80, 60, 0.35); }\n"
    << ".level-high { background: rgba(230, 80, 60, 0.55); }\n"
    << ".level-very_high { background: rgba(230, 80, 60, 0.8); }\n"
    << ".legend { font-size: 0.85rem; color: #444; margin-top: 2rem; }\n"
    << "</style>\n</head>\n<body>\n<p class=\"document\">\n";
  char buf[160];
  for (const auto& s : r.sentences) {
    std::snprintf(buf, sizeof buf, "lex %.3f, gram %.3f, syn %.3f, mean %.3f", s.scores.lex, s.scores.gram,
                  s.scores.syn, s.scores.mean());
    o << "<span class=\"mfd-sentence level-" << to_string(s.level) << "\" data-index=\"" << s.index
      << "\" data-level=\"" << to_string(s.level) << "\" title=\"" << buf << "\">" << escape_html(s.text)
      << "</span>\n";
  }
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * r.fraction_above_floor);
  o << "</p>\n<div class=\"legend\">Sentences above the " << r.bands.floor * 100.0 << "% floor: " << buf
    << ". Shades: low, medium, high, very high.</div>\n</body>\n</html>\n";
  return o.str();
}

}  // namespace mfd
