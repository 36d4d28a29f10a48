#include <doctest.h>

#include <algorithm>
#include <set>

#include "mfd/corpus.hpp"
#include "mfd/error.hpp"
#include "mfd/random.hpp"

using namespace mfd;

namespace {

std::vector<std::string> texts(const Document& d) {
  std::vector<std::string> out;
  for (const auto& s : d.sentences()) out.push_back(s.text);
  return out;
}

Document make_doc(const std::string& id, std::size_t n) {
  std::vector<Sentence> s;
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back({"Sentence " + std::to_string(i) + ".", i, InvolvementScores{0.1, 0.2, 0.3}});
  }
  return Document(id, s);
}

}  // namespace

TEST_CASE("delimiter segmentation") {
  const auto d = segment_document("A.</s>B.", SegmentMode::delimiter);
  CHECK(texts(d) == std::vector<std::string>{"A.", "B."});
  CHECK(d.sentences()[1].index == 1);
  CHECK(texts(segment_document("A.</s> </s>B.", SegmentMode::delimiter)).size() == 2);
  CHECK_THROWS_AS(segment_document("  </s> ", SegmentMode::delimiter), EmptyDocument);
}

TEST_CASE("rule-based segmentation") {
  CHECK(texts(segment_document("Hi. Go!", SegmentMode::rule_based)) ==
        std::vector<std::string>{"Hi.", "Go!"});
  const auto& guards = abbreviation_guard_list();
  CHECK(std::find(guards.begin(), guards.end(), "e.g.") != guards.end());
  CHECK(texts(segment_document("e.g. we test. Done.", SegmentMode::rule_based)) ==
        std::vector<std::string>{"e.g. we test.", "Done."});
  CHECK(texts(segment_document("See Fig. 3 for details. It works.", SegmentMode::rule_based)) ==
        std::vector<std::string>{"See Fig. 3 for details.", "It works."});
  CHECK(texts(segment_document("Smith et al. Proposed it. Yes.", SegmentMode::rule_based)).size() == 2);
  CHECK(texts(segment_document("it ended. then lower case.", SegmentMode::rule_based)).size() == 1);
  CHECK(texts(segment_document("Value was 3. 4 more remain.", SegmentMode::rule_based)).size() == 2);
}

TEST_CASE("delimiter segmentation is total") {
  Rng rng(4);
  const std::vector<std::string> pieces = {"Alpha.", "Beta gamma.", "", "Delta?", "Eps!"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> parts;
    const auto n = 1 + rng.below(6);
    for (std::uint64_t i = 0; i < n; ++i) parts.push_back(pieces[rng.below(pieces.size())]);
    std::string raw;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) raw += "</s>";
      raw += parts[i];
      if (!parts[i].empty()) kept.push_back(parts[i]);
    }
    if (kept.empty()) {
      CHECK_THROWS_AS(segment_document(raw, SegmentMode::delimiter), EmptyDocument);
      continue;
    }
    const auto d = segment_document(raw, SegmentMode::delimiter);
    CHECK(texts(d) == kept);
    std::string joined;
    for (std::size_t i = 0; i < kept.size(); ++i) joined += (i ? "</s>" : "") + kept[i];
    CHECK(d.joined_text() == joined);
  }
}

TEST_CASE("NFC is applied on ingestion") {
  const auto d = segment_document("Caf\x65\xcc\x81 time.", SegmentMode::delimiter);
  CHECK(d.sentences()[0].text == "Caf\xc3\xa9 time.");
}

TEST_CASE("labeled dataset loading") {
  const std::string jsonl =
      R"({"id":"a","text":"One.</s>Two.","labels":[[0.1,0.2,0.3],[1,1,1]]})" "\n"
      R"({"id":"b","text":"Three.","labels":[[0,0,0]]})" "\n"
      R"({"id":"c","text":"Four.","labels":[[0.5,0.5,0.5]]})" "\n";
  const auto docs = parse_labeled_dataset(jsonl, LabelFormat::regression);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].id() == "a");
  CHECK(docs[2].id() == "c");
  CHECK(docs[0].sentences()[0].labels == InvolvementScores{0.1, 0.2, 0.3});
  CHECK(docs[0].sentences()[1].labels == InvolvementScores{1, 1, 1});

  CHECK_THROWS_AS(parse_labeled_dataset(R"({"id":"x","text":"A.","labels":[[1.5,0,0]]})",
                                        LabelFormat::regression),
                  LabelRangeError);
  CHECK_THROWS_AS(parse_labeled_dataset(R"({"id":"x","text":"A.","labels":[[0.5,0,0]]})",
                                        LabelFormat::binary),
                  LabelRangeError);
  try {
    parse_labeled_dataset(jsonl + "{not json}\n", LabelFormat::regression);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_labeled_dataset(R"({"id":"x","text":"A.</s>B.","labels":[[0,0,0]]})",
                                        LabelFormat::regression),
                  SchemaError);
}

TEST_CASE("load, serialize, load is the identity") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Document> docs;
    const auto n = 1 + rng.below(5);
    for (std::uint64_t d = 0; d < n; ++d) {
      std::vector<Sentence> s;
      const auto m = 1 + rng.below(4);
      for (std::uint64_t i = 0; i < m; ++i) {
        s.push_back({"Sentence \"" + std::to_string(rng.below(1000)) + "\" here.", i,
                     InvolvementScores{rng.uniform(), rng.uniform(), rng.uniform()}});
      }
      docs.emplace_back("doc" + std::to_string(d), s, DocumentSource::mixed);
    }
    const auto once = parse_labeled_dataset(serialize_dataset(docs), LabelFormat::regression);
    CHECK(once == docs);
  }
}

TEST_CASE("split_dataset") {
  std::vector<Document> ten, seven;
  for (int i = 0; i < 10; ++i) ten.push_back(make_doc("d" + std::to_string(i), 1));
  for (int i = 0; i < 7; ++i) seven.push_back(make_doc("d" + std::to_string(i), 1));
  const auto s10 = split_dataset(ten, {}, 7);
  CHECK(s10.train.size() == 8);
  CHECK(s10.val.size() == 1);
  CHECK(s10.test.size() == 1);
  const auto s7 = split_dataset(seven, {}, 7);
  CHECK(s7.train.size() == 7);
  CHECK(s7.val.empty());
  const auto again = split_dataset(ten, {}, 7);
  CHECK(again.train == s10.train);
  CHECK(again.test == s10.test);
  std::set<std::string> ids;
  for (const auto* part : {&s10.train, &s10.val, &s10.test}) {
    for (const auto& d : *part) CHECK(ids.insert(d.id()).second);
  }
  CHECK(ids.size() == 10);
  CHECK_THROWS_AS(split_dataset(ten, {0.5, 0.1, 0.1}, 7), InvalidFractions);
}

TEST_CASE("scores clamp") {
  const auto s = InvolvementScores::clamped(1.5, -0.2, std::nan(""));
  CHECK(s == InvolvementScores{1, 0, 0});
}
