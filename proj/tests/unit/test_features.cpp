#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "../common/golden_corpus.hpp"
#include "mfd/annotate.hpp"
#include "mfd/authorstyle.hpp"
#include "mfd/error.hpp"
#include "mfd/lexicon.hpp"
#include "mfd/lowlevel.hpp"
#include "mfd/random.hpp"
#include "mfd/readability.hpp"

using namespace mfd;

namespace {

double lookup(const NamedValues& values, const std::string& name) {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  FAIL("missing slot " << name);
  return 0;
}

}  // namespace

TEST_CASE("annotate splits words and punctuation") {
  const auto ann = annotate("The cat sat.");
  REQUIRE(ann.tokens.size() == 4);
  CHECK(ann.word_count() == 3);
  CHECK(ann.tokens[3].pos == PosTag::PUNCT);
  CHECK_FALSE(ann.tokens[3].is_word);
  CHECK(annotate("?!").degenerate());
}

TEST_CASE("syllable heuristic") {
  CHECK(count_syllables("cat") == 1);
  CHECK(count_syllables("running") == 2);
  CHECK(count_syllables("house") == 1);
  CHECK(count_syllables("table") == 2);
  CHECK(count_syllables("the") == 1);
  CHECK(count_syllables("mfd") == 1);
  CHECK(count_syllables("sophisticated") == 5);
}

TEST_CASE("golden corpus annotations agree with the hand annotation") {
  for (const auto& s : golden::corpus()) {
    CAPTURE(s.text);
    const auto ann = annotate(s.text);
    std::vector<const Token*> words;
    for (const auto& t : ann.tokens) {
      if (t.is_word) words.push_back(&t);
    }
    REQUIRE(words.size() == s.words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto& g = s.words[i];
      CAPTURE(g.lower);
      CHECK(words[i]->lower == g.lower);
      CHECK(words[i]->syllables == g.syllables);
      CHECK(static_cast<int>(words[i]->length) == g.length);
      CHECK(static_cast<int>(words[i]->letters) == g.letters);
      CHECK(words[i]->is_number == g.number);
      CHECK(words[i]->is_stopword == g.stop);
      CHECK(words[i]->is_function_word == g.function);
      if (!g.number) {
        CHECK(lexicon::is_easy_word(g.lower) == g.easy);
        CHECK(lexicon::frequency_class(g.lower) == g.freq_class);
      }
    }
  }
}

TEST_CASE("readability formulas match the golden oracle") {
  for (const auto& s : golden::corpus()) {
    CAPTURE(s.text);
    const auto got = readability_features(annotate(s.text));
    const auto want = golden::readability(s);
    REQUIRE(got.size() == 15);
    for (const auto& [name, value] : want) {
      CAPTURE(name);
      CHECK(std::abs(lookup(got, name) - value) <= 1e-9);
    }
  }
}

TEST_CASE("authorstyle scalars match the golden oracle") {
  for (const auto& s : golden::corpus()) {
    CAPTURE(s.text);
    const auto got = authorstyle_features(annotate(s.text));
    for (const auto& [name, value] : golden::authorstyle(s)) {
      CAPTURE(name);
      CHECK(std::abs(lookup(got, name) - value) <= 1e-9);
    }
  }
}

TEST_CASE("worked examples for the cat sentence") {
  const auto ann = annotate("The cat sat.");
  const auto r = readability_features(ann);
  CHECK(lookup(r, "flesch_reading_ease") == doctest::Approx(119.19).epsilon(1e-12));
  CHECK(lookup(r, "automated_readability_index") == doctest::Approx(-5.80).epsilon(1e-12));
  CHECK(lookup(r, "gunning_fog") == doctest::Approx(1.2).epsilon(1e-12));
  const auto a = authorstyle_scalars(ann);
  CHECK(a.avg_word_length == 3.0);
  CHECK(a.stopword_ratio == doctest::Approx(1.0 / 3.0));
  CHECK(yule_k({"a", "b", "c", "d"}) == 0.0);
}

TEST_CASE("degenerate input raises for features and imputes in the vector") {
  const auto ann = annotate("...");
  CHECK_THROWS_AS(readability_features(ann), DegenerateInput);
  CHECK_THROWS_AS(authorstyle_scalars(ann), DegenerateInput);
  const auto v = extract_lowlevel("...");
  CHECK(v.degenerate);
  CHECK(v.values.size() == lowlevel_layout().width());
}

TEST_CASE("frequencies are in [0,1] and histograms sum to one") {
  Rng rng(11);
  const std::vector<std::string> vocab = {"the", "model", "Results", "running", "is", "a",
                                          "quickly", "3.5", "cat", "approach", "(", ",", "!"};
  const auto& names = authorstyle_slot_names();
  for (int trial = 0; trial < 100; ++trial) {
    std::string text;
    const auto n = 1 + rng.below(25);
    for (std::uint64_t i = 0; i < n; ++i) text += vocab[rng.below(vocab.size())] + " ";
    text += "word.";
    const auto f = authorstyle_features(annotate(text));
    REQUIRE(f.size() == names.size());
    double pos = 0, len = 0, sent = 0, tri = 0;
    for (const auto& [k, v] : f) {
      CHECK(std::isfinite(v));
      const bool is_freq = k.starts_with("pos_") || k.starts_with("word_length.") ||
                           k.starts_with("sentence_length.") || k.ends_with("_freq") ||
                           k == "stopword_ratio" || k == "sichel_s";
      if (is_freq) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
      }
      if (k.starts_with("pos_freq.")) pos += v;
      if (k.starts_with("pos_trigram.")) tri += v;
      if (k.starts_with("word_length.")) len += v;
      if (k.starts_with("sentence_length.")) sent += v;
    }
    CHECK(pos == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tri == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(len == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sent == 1.0);
  }
}

TEST_CASE("low-level vector layout and determinism") {
  const auto& layout = lowlevel_layout();
  CHECK(layout.width() == 15 + authorstyle_slot_names().size());
  CHECK(layout.hash().size() == 64);
  const auto a = extract_lowlevel("We propose a new method for text detection.");
  const auto b = extract_lowlevel("We propose a new method for text detection.");
  CHECK(a.values == b.values);
  CHECK(a.values.size() == layout.width());
}

TEST_CASE("parallel extraction equals serial extraction bitwise") {
  std::vector<std::string> sents;
  for (const auto& s : golden::corpus()) sents.push_back(s.text);
  for (int i = 0; i < 5; ++i) sents.insert(sents.end(), sents.begin(), sents.begin() + 10);
  const auto s = extract_lowlevel_batch(sents, ExecPolicy::serial);
  const auto p = extract_lowlevel_batch(sents, ExecPolicy::parallel);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].values == p[i].values);
}

TEST_CASE("normalize") {
  const std::size_t w = lowlevel_layout().width();
  NormStats stats;
  stats.layout_hash = lowlevel_layout().hash();
  stats.mean.assign(w, 5.0);
  stats.stddev.assign(w, 2.0);
  stats.stddev[1] = 0.0;
  LowLevelVector raw{std::vector<double>(w, 7.0), false};
  const auto z = normalize(raw, stats);
  CHECK(z.values[0] == 1.0);
  CHECK(z.values[1] == 0.0);

  NormStats wrong = stats;
  wrong.layout_hash = "deadbeef";
  CHECK_THROWS_AS(normalize(raw, wrong), StatsMismatch);

  std::vector<LowLevelVector> train;
  for (const auto& s : golden::corpus()) train.push_back(extract_lowlevel(s.text));
  const auto fitted = NormStats::fit(train);
  std::vector<double> sum(w, 0.0);
  for (const auto& v : train) {
    const auto n = normalize(v, fitted);
    for (std::size_t i = 0; i < w; ++i) sum[i] += n.values[i];
  }
  for (std::size_t i = 0; i < w; ++i) CHECK(std::abs(sum[i] / train.size()) <= 1e-9);
  const auto round = NormStats::from_json(fitted.to_json());
  CHECK(round.mean == fitted.mean);
  CHECK(round.stddev == fitted.stddev);
}
