// Copyright 2026 The mapcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcap/errors.hpp"
#include "mapcap/metrics.hpp"
#include "mapcap/osmref.hpp"
#include "test_support.hpp"

using namespace mapcap;
using namespace mapcap::metrics;

namespace {

std::vector<std::string> texts(const CandidateList& c) {
  std::vector<std::string> out;
  for (const auto& e : c.entries) out.push_back(e.text);
  return out;
}

CandidateList candidates_from(const std::vector<std::string>& names) {
  CandidateList out;
  for (const auto& n : names) {
    Candidate c;
    c.text = n;
    c.normalized = osmref::normalize_name(n);
    out.entries.push_back(std::move(c));
  }
  return out;
}

osmref::ReferenceList refs_from(const std::vector<std::string>& entries) {
  osmref::ReferenceList r;
  r.entries = entries;
  return r;
}

}  // namespace

TEST_CASE("extraction finds multiword names and skips plain prose") {
  const auto c =
      extract_proper_nouns("The scene shows Lake Tahoe near Incline Village.");
  CHECK(texts(c) == std::vector<std::string>{"Lake Tahoe", "Incline Village"});
}

TEST_CASE("extraction bridges connectors at sentence start") {
  const auto c = extract_proper_nouns("Port of Oakland is visible.");
  CHECK(texts(c) == std::vector<std::string>{"Port of Oakland"});
}

TEST_CASE("extraction trims determiner openers off longer runs") {
  const auto c = extract_proper_nouns("The Eiffel Tower dominates the scene.");
  CHECK(texts(c) == std::vector<std::string>{"Eiffel Tower"});
}

TEST_CASE("extraction drops lone sentence openers that are common words") {
  const auto c = extract_proper_nouns(
      "Nearby are several warehouses. Overall the area looks industrial.");
  CHECK(c.size() == 0);
}

TEST_CASE("extraction joins hyphens and french connectors") {
  const auto a = extract_proper_nouns("It lies in Auvergne-Rh\xC3\xB4ne-Alpes.");
  CHECK(texts(a) == std::vector<std::string>{"Auvergne-Rh\xC3\xB4ne-Alpes"});
  const auto b = extract_proper_nouns("Trains leave from Gare du Nord daily.");
  CHECK(texts(b) == std::vector<std::string>{"Gare du Nord"});
}

TEST_CASE("extraction of empty text is empty") {
  CHECK(extract_proper_nouns("").size() == 0);
}

TEST_CASE("extraction spans are ascending, non-overlapping and verbatim") {
  const std::string caption =
      "Rue A crosses Avenue Berthelot near Parc Central.";
  const auto c = extract_proper_nouns(caption);
  REQUIRE(c.size() >= 2);
  std::size_t prev_end = 0;
  for (const auto& e : c.entries) {
    CHECK(e.begin >= prev_end);
    CHECK(e.end > e.begin);
    CHECK(caption.substr(e.begin, e.end - e.begin) == e.text);
    prev_end = e.end;
  }
}

TEST_CASE("extraction clears the hand-labeled corpus at F1 >= 0.9") {
  const auto path = testsupport::fixtures_dir() / "ner" / "ner_corpus.jsonl";
  std::istringstream in(testsupport::read_file(path));
  std::string line;
  int tp = 0, fp = 0, fn = 0, sentences = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++sentences;
    const auto doc = nlohmann::json::parse(line);
    const auto expected = doc.at("entities").get<std::vector<std::string>>();
    const auto got =
        texts(extract_proper_nouns(doc.at("text").get<std::string>()));
    std::map<std::string, int> want;
    for (const auto& e : expected) ++want[e];
    for (const auto& g : got) {
      auto it = want.find(g);
      if (it != want.end() && it->second > 0) {
        --it->second;
        ++tp;
      } else {
        ++fp;
      }
    }
    for (const auto& [name, count] : want) fn += count;
  }
  REQUIRE(sentences == 50);
  const double precision = tp ? double(tp) / (tp + fp) : 0.0;
  const double recall = tp ? double(tp) / (tp + fn) : 0.0;
  const double f1 = (precision + recall) > 0
                        ? 2 * precision * recall / (precision + recall)
                        : 0.0;
  INFO("tp=" << tp << " fp=" << fp << " fn=" << fn << " f1=" << f1);
  CHECK(f1 >= 0.9);
}

TEST_CASE("normalize_name canonicalizes punctuation and case") {
  CHECK(osmref::normalize_name("St. Mary's  Church") == "st mary s church");
  CHECK(osmref::normalize_name("M\xC3\xBCller-Stra\xC3\x9F\x65") ==
        "m\xC3\xBCller stra\xC3\x9F\x65");
  CHECK(osmref::normalize_name("") == "");
}

TEST_CASE("normalize_name is idempotent") {
  for (const std::string s :
       {"  Rue   de  la R\xC3\xA9publique ", "PARC-CENTRAL", "a.b.c",
        "Caf\xC3\xA9 \xE2\x80\x9CLumi\xC3\xA8re\xE2\x80\x9D"}) {
    const auto once = osmref::normalize_name(s);
    CHECK(osmref::normalize_name(once) == once);
  }
}

TEST_CASE("fdr counts unsupported names over all candidates") {
  const auto report =
      compute_fdr(candidates_from({"Central Park", "Hudson River"}),
                  refs_from({"central park"}), MatchMode::Exact);
  CHECK(report.fdr == 0.5);
  CHECK(report.k == 2);
  CHECK(report.hits == 1);
  REQUIRE(report.misses.size() == 1);
  CHECK(report.misses[0].text == "Hudson River");
  CHECK_FALSE(report.vacuous);
}

TEST_CASE("fdr with no candidates is zero and vacuous") {
  const auto report =
      compute_fdr({}, refs_from({"anything"}), MatchMode::Exact);
  CHECK(report.fdr == 0.0);
  CHECK(report.k == 0);
  CHECK(report.vacuous);
}

TEST_CASE("match mode separates exact from containment") {
  const auto c = candidates_from({"Park Slope"});
  const auto r = refs_from({"park slope historic district"});
  CHECK(compute_fdr(c, r, MatchMode::Exact).fdr == 1.0);
  CHECK(compute_fdr(c, r, MatchMode::WordBoundaryContainment).fdr == 0.0);
}

TEST_CASE("containment requires whole words, not substrings") {
  const auto c = candidates_from({"Parkside"});
  const auto r = refs_from({"park slope"});
  CHECK(compute_fdr(c, r, MatchMode::WordBoundaryContainment).fdr == 1.0);
}

TEST_CASE("duplicate candidates count per occurrence") {
  const auto report = compute_fdr(
      candidates_from({"Rue A", "Rue A", "Ghost Lane"}),
      refs_from({"rue a"}), MatchMode::Exact);
  CHECK(report.k == 3);
  CHECK(report.hits == 2);
  CHECK(report.fdr == 1.0 / 3.0);
}

TEST_CASE("fdr arithmetic is the exact rational (k - hits) / k") {
  const auto report = compute_fdr(
      candidates_from({"A B", "C D", "E F"}), refs_from({"a b"}),
      MatchMode::Exact);
  CHECK(report.fdr == 2.0 / 3.0);
}

TEST_CASE("match mode names round trip") {
  CHECK(match_mode_name(MatchMode::Exact) == "exact");
  CHECK(match_mode_from_name("containment") ==
        MatchMode::WordBoundaryContainment);
  CHECK(match_mode_from_name(match_mode_name(
            MatchMode::WordBoundaryContainment)) ==
        MatchMode::WordBoundaryContainment);
  CHECK_THROWS_AS(match_mode_from_name("fuzzy"), Error);
}

TEST_CASE("uncertainty counts hedge tokens over all tokens") {
  const auto lex = HedgeLexicon::from_entries({"possibly"}, "test");
  const auto r = compute_uncertainty("This is possibly a stadium", lex);
  CHECK(r.hedge_hits == 1);
  CHECK(r.total_tokens == 5);
  CHECK(r.uncertain_pct == 20.0);
  CHECK(r.lexicon_id == "test");
}

TEST_CASE("multiword hedge phrases claim each word once") {
  const auto lex =
      HedgeLexicon::from_entries({"appears", "appears to be"}, "test");
  const auto r =
      compute_uncertainty("It appears to be a long narrow runway here", lex);
  // The phrase claims three tokens; the single-word entry must not double
  // count any of them.
  CHECK(r.hedge_hits == 3);
  CHECK(r.total_tokens == 9);
}

TEST_CASE("uncertainty of empty text is vacuous") {
  const auto lex = HedgeLexicon::from_entries({"possibly"}, "test");
  const auto r = compute_uncertainty("", lex);
  CHECK(r.uncertain_pct == 0.0);
  CHECK(r.total_tokens == 0);
  CHECK(r.vacuous);
}

TEST_CASE("uncertainty tokenization is case folded") {
  const auto lex = HedgeLexicon::from_entries({"perhaps"}, "test");
  const auto r = compute_uncertainty("PERHAPS so. Perhaps not.", lex);
  CHECK(r.hedge_hits == 2);
  CHECK(r.total_tokens == 4);
}

TEST_CASE("shipped hedge lexicon loads with a stable id") {
  const auto path = testsupport::data_dir() / "hedge_lexicon.txt";
  const auto a = HedgeLexicon::load(path);
  const auto b = HedgeLexicon::load(path);
  CHECK_FALSE(a.entries.empty());
  CHECK(a.id == b.id);
  CHECK_FALSE(a.id.empty());
  for (std::size_t i = 1; i < a.entries.size(); ++i) {
    CHECK(a.entries[i - 1] < a.entries[i]);
  }
}

TEST_CASE("report serialization round trips") {
  const auto report =
      compute_fdr(candidates_from({"Central Park", "Hudson River"}),
                  refs_from({"central park"}), MatchMode::Exact);
  nlohmann::json j = report;
  const FdrReport back = j;
  CHECK(back.fdr == report.fdr);
  CHECK(back.k == report.k);
  CHECK(back.hits == report.hits);
  CHECK(back.mode == report.mode);
  REQUIRE(back.misses.size() == 1);
  CHECK(back.misses[0].text == "Hudson River");
}
