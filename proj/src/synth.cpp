#include "mfd/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace mfd {

namespace {

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& options) {
  return options[rng.below(N)];
}

constexpr std::array<const char*, 10> kSubjects = {
    "We", "The team", "Our group", "They", "Most people", "The students", "My friend", "The new staff",
    "Everyone here", "The old crew"};
constexpr std::array<const char*, 16> kVerbs = {"use", "need", "check", "keep", "build", "change",
                                                "test", "fix", "find", "see", "get", "try",
                                                "give up on", "look at", "want", "like"};
constexpr std::array<const char*, 14> kObjects = {
    "the main idea", "a small problem", "the whole plan", "many things", "the big parts",
    "a good way", "the test results", "an easy job", "lots of ideas", "the hard parts",
    "a clear method", "the first draft", "a fast car", "the important work"};
constexpr std::array<const char*, 12> kTails = {
    "", "", "", " very often", " now", " again and again", " later", " at home",
    " on most days", " with some help", " almost every week", " for a while"};
constexpr std::array<const char*, 10> kAsides = {
    "it's really easy", "we don't have time", "that's the plan", "it isn't clear",
    "they're sure about it", "there's no other way", "we can't wait", "it's a big deal",
    "we've got enough", "I'm not sure"};
constexpr std::array<const char*, 6> kSubs = {"because", "when", "although", "since", "if", "after"};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

std::string synth_human_sentence(Rng& rng) {
  const std::string core =
      std::string(pick(rng, kSubjects)) + " " + pick(rng, kVerbs) + " " + pick(rng, kObjects) + pick(rng, kTails);
  switch (rng.below(4)) {
    case 0:
      return core + ".";
    case 1:  // subordinate clause first
      return capitalize(std::string(pick(rng, kSubs)) + " " + pick(rng, kAsides)) + ", " +
             std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(core[0])))) + core.substr(1) +
             ".";
    case 2:
      return core + " " + pick(rng, kSubs) + " " + pick(rng, kAsides) + ".";
    default:
      return core + ", but " + pick(rng, kAsides) + ".";
  }
}

InvolvementScores labels_from_edits(const EditStats& s) {
  auto dim = [](std::size_t edits, std::size_t candidates) {
    if (edits == 0 || candidates == 0) return 0.0;
    return 0.6 + 0.4 * static_cast<double>(edits) / static_cast<double>(candidates);
  };
  return InvolvementScores::clamped(dim(s.lexical_edits, s.lexical_candidates),
                                    dim(s.grammar_edits, s.grammar_candidates), s.syntax_edit ? 1.0 : 0.0);
}

std::vector<Document> synth_corpus(const SynthConfig& config) {
  Rng rng(config.seed);
  std::vector<Document> docs;
  for (std::size_t d = 0; d < config.documents; ++d) {
    const double share =
        config.llm_fraction_min + (config.llm_fraction_max - config.llm_fraction_min) * rng.uniform();
    std::vector<Sentence> sentences;
    for (std::size_t i = 0; i < config.sentences_per_doc; ++i) {
      std::string text = synth_human_sentence(rng);
      InvolvementScores labels;
      if (rng.uniform() < share) {
        const double intensity =
            config.intensity_min + (config.intensity_max - config.intensity_min) * rng.uniform();
        const auto r = paraphrase(text, ParaphraseStyle::formalize, intensity, rng.next_u64());
        text = r.text;
        labels = labels_from_edits(r.stats);
      }
      sentences.push_back({std::move(text), i, labels});
    }
    docs.emplace_back("synth-" + std::to_string(d), std::move(sentences), DocumentSource::mixed);
  }
  return docs;
}

ContrastivePool synth_contrastive_pool(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ContrastivePool pool;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string base = synth_human_sentence(rng);
    pool.llm.push_back(paraphrase(base, ParaphraseStyle::formalize, 1.0, rng.next_u64()).text);
    pool.human.push_back(synth_human_sentence(rng));
  }
  return pool;
}

}  // namespace mfd
