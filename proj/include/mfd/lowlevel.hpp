#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/corpus.hpp"
#include "mfd/exec.hpp"

namespace mfd {

// Ordered slot names of the low-level vector (readability then authorstyle).
struct FeatureLayout {
  std::vector<std::string> slots;
  std::string lexicon_hash;

  std::size_t width() const { return slots.size(); }
  nlohmann::json manifest() const;
  // SHA-256 of the canonical manifest dump.
  std::string hash() const;
  bool operator==(const FeatureLayout&) const = default;
};

// The frozen layout produced by this build.
const FeatureLayout& lowlevel_layout();

struct LowLevelVector {
  std::vector<double> values;
  // No word tokens: values are zero-imputed and normalize() maps them to 0.
  bool degenerate = false;
};

LowLevelVector extract_lowlevel(std::string_view sentence_text);

// Per-sentence extraction over many sentences; the parallel policy produces
// bitwise-identical output to the serial one.
std::vector<LowLevelVector> extract_lowlevel_batch(std::span<const std::string> sentences,
                                                   ExecPolicy policy = ExecPolicy::parallel);

struct NormStats {
  std::string layout_hash;
  std::vector<double> mean;
  std::vector<double> stddev;

  // Population mean/std over non-degenerate vectors of the training split.
  static NormStats fit(std::span<const LowLevelVector> training);
  nlohmann::json to_json() const;
  static NormStats from_json(const nlohmann::json& j);
};

// z-score per slot; std < 1e-8 maps the slot to 0. Throws StatsMismatch on layout mismatch.
LowLevelVector normalize(const LowLevelVector& raw, const NormStats& stats);

}  // namespace mfd
