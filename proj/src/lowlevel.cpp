#include "mfd/lowlevel.hpp"

#include <cmath>

#include "mfd/annotate.hpp"
#include "mfd/authorstyle.hpp"
#include "mfd/error.hpp"
#include "mfd/hash.hpp"
#include "mfd/lexicon.hpp"
#include "mfd/readability.hpp"

namespace mfd {

using nlohmann::json;

json FeatureLayout::manifest() const {
  json formulas = json::object();
  for (const auto& [name, formula] : readability_formulas()) formulas[name] = formula;
  return {
      {"name", "mfd-lowlevel"},
      {"version", 1},
      {"width", width()},
      {"slots", slots},
      {"lexicon_hash", lexicon_hash},
      {"readability_formulas", formulas},
      {"conventions",
       {{"sentences_per_unit", 1},
        {"syllables", "vowel groups [aeiouy] with silent final e (not consonant+le), min 1"},
        {"pos_trigram_buckets", kPosTrigramBuckets},
        {"word_length_bins", "1..14, 15+"},
        {"char_frequencies", "count / code points in sentence text"},
        {"special_characters", "not alphanumeric, not punctuation, not whitespace"}}},
  };
}

std::string FeatureLayout::hash() const { return sha256_hex(manifest().dump()); }

const FeatureLayout& lowlevel_layout() {
  static const FeatureLayout kLayout = [] {
    FeatureLayout layout;
    layout.slots = readability_slot_names();
    const auto& style = authorstyle_slot_names();
    for (const auto& s : style) layout.slots.push_back("style." + s);
    for (std::size_t i = 0; i < readability_slot_names().size(); ++i) {
      layout.slots[i] = "readability." + layout.slots[i];
    }
    layout.lexicon_hash = lexicon::version_hash();
    return layout;
  }();
  return kLayout;
}

LowLevelVector extract_lowlevel(std::string_view sentence_text) {
  const auto ann = annotate(sentence_text);
  LowLevelVector v;
  if (ann.degenerate()) {
    v.values.assign(lowlevel_layout().width(), 0.0);
    v.degenerate = true;
    return v;
  }
  v.values.reserve(lowlevel_layout().width());
  for (const auto& [name, value] : readability_features(ann)) v.values.push_back(value);
  for (const auto& [name, value] : authorstyle_features(ann)) v.values.push_back(value);
  return v;
}

std::vector<LowLevelVector> extract_lowlevel_batch(std::span<const std::string> sentences,
                                                   ExecPolicy policy) {
  std::vector<LowLevelVector> out(sentences.size());
  const auto n = static_cast<long>(sentences.size());
  if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = extract_lowlevel(sentences[static_cast<std::size_t>(i)]);
  } else {
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = extract_lowlevel(sentences[static_cast<std::size_t>(i)]);
  }
  return out;
}

NormStats NormStats::fit(std::span<const LowLevelVector> training) {
  const std::size_t width = lowlevel_layout().width();
  NormStats stats;
  stats.layout_hash = lowlevel_layout().hash();
  stats.mean.assign(width, 0.0);
  stats.stddev.assign(width, 0.0);
  std::size_t n = 0;
  for (const auto& v : training) {
    if (v.degenerate) continue;
    if (v.values.size() != width) throw StatsMismatch("training vector width differs from layout");
    for (std::size_t i = 0; i < width; ++i) stats.mean[i] += v.values[i];
    ++n;
  }
  if (n == 0) return stats;
  for (double& m : stats.mean) m /= static_cast<double>(n);
  for (const auto& v : training) {
    if (v.degenerate) continue;
    for (std::size_t i = 0; i < width; ++i) {
      const double d = v.values[i] - stats.mean[i];
      stats.stddev[i] += d * d;
    }
  }
  for (double& s : stats.stddev) s = std::sqrt(s / static_cast<double>(n));
  return stats;
}

json NormStats::to_json() const {
  return {{"layout_hash", layout_hash}, {"mean", mean}, {"stddev", stddev}};
}

NormStats NormStats::from_json(const json& j) {
  NormStats s;
  s.layout_hash = j.at("layout_hash").get<std::string>();
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
  return s;
}

LowLevelVector normalize(const LowLevelVector& raw, const NormStats& stats) {
  if (stats.layout_hash != lowlevel_layout().hash() || stats.mean.size() != raw.values.size() ||
      stats.stddev.size() != raw.values.size()) {
    throw StatsMismatch("normalization stats were fitted on a different feature layout");
  }
  LowLevelVector out;
  out.degenerate = raw.degenerate;
  out.values.assign(raw.values.size(), 0.0);
  if (raw.degenerate) return out;
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    if (stats.stddev[i] < 1e-8) continue;
    out.values[i] = (raw.values[i] - stats.mean[i]) / stats.stddev[i];
  }
  return out;
}

}  // namespace mfd
