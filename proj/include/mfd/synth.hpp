#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfd/corpus.hpp"
#include "mfd/paraphrase.hpp"
#include "mfd/random.hpp"

namespace mfd {

// Template-generated plain-register sentence.
std::string synth_human_sentence(Rng& rng);

// Per-dimension labels from paraphrase edit counts. An untouched dimension is
// 0; an edited one is 0.6 + 0.4 * (edits / opportunities), so labels stay off
// the 0.5 binarization threshold.
InvolvementScores labels_from_edits(const EditStats& stats);

struct SynthConfig {
  std::size_t documents = 64;
  std::size_t sentences_per_doc = 8;
  double llm_fraction_min = 0.25;  // per-document share of rewritten sentences
  double llm_fraction_max = 0.75;
  double intensity_min = 0.5;
  double intensity_max = 1.0;
  std::uint64_t seed = 42;
};

// Mixed documents: human sentences labeled (0,0,0) interleaved with formalized
// rewrites labeled from their edits.
std::vector<Document> synth_corpus(const SynthConfig& config);

// Matching LLM-register and unrelated human sentences for contrastive training.
struct ContrastivePool {
  std::vector<std::string> llm;
  std::vector<std::string> human;
};
ContrastivePool synth_contrastive_pool(std::size_t n, std::uint64_t seed);

}  // namespace mfd
