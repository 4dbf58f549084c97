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

#ifndef MAPCAP_METRICS_HPP_
#define MAPCAP_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mapcap/osmref.hpp"

namespace mapcap::metrics {

// One extracted proper-noun mention: the verbatim caption substring, its
// byte span, and the canonical form used for matching.
struct Candidate {
  std::string text;
  std::size_t begin = 0;  // byte offset, inclusive
  std::size_t end = 0;    // byte offset, exclusive
  std::string normalized;
};

// Proper nouns in caption order; duplicates retained, spans ascending and
// non-overlapping.
struct CandidateList {
  std::vector<Candidate> entries;
  std::size_t size() const { return entries.size(); }
};

enum class MatchMode { Exact, WordBoundaryContainment };

std::string match_mode_name(MatchMode m);
MatchMode match_mode_from_name(const std::string& name);

// False-discovery rate over candidate mentions: the fraction of extracted
// names with no support in the reference list. Zero candidates scores 0 and
// is flagged vacuous.
struct FdrReport {
  double fdr = 0.0;
  int k = 0;
  int hits = 0;
  std::vector<Candidate> misses;
  bool vacuous = false;
  MatchMode mode = MatchMode::Exact;
};

void to_json(nlohmann::json& j, const FdrReport& r);
void from_json(const nlohmann::json& j, FdrReport& r);

struct UncertaintyReport {
  double uncertain_pct = 0.0;
  int hedge_hits = 0;
  int total_tokens = 0;
  std::string lexicon_id;
  bool vacuous = false;
};

void to_json(nlohmann::json& j, const UncertaintyReport& r);
void from_json(const nlohmann::json& j, UncertaintyReport& r);

struct HedgeLexicon {
  std::vector<std::string> entries;  // lowercased, deduplicated, sorted
  std::string id;                    // content hash of the source file

  static HedgeLexicon load(const std::filesystem::path& path);
  static HedgeLexicon from_entries(const std::vector<std::string>& entries,
                                   const std::string& id);
};

// Heuristic proper-noun mention extraction: maximal runs of capitalized
// tokens, bridged by a short list of lowercase connectors, hyphens, and
// abbreviation periods. Sentence-initial capitalized words pass only when
// they are not everyday caption vocabulary or when another capitalized token
// follows. Reported verbatim with spans; normalized for matching.
CandidateList extract_proper_nouns(std::string_view caption);

// 1_R(c) per candidate: Exact compares normalized forms; containment also
// accepts one side being a whole-word token subsequence of the other.
// Duplicate candidates count per occurrence.
FdrReport compute_fdr(const CandidateList& candidates,
                      const osmref::ReferenceList& refs, MatchMode mode);

// Share of caption tokens claimed by hedge vocabulary. Tokens are maximal
// alphabetic runs, case-folded; multi-word lexicon phrases claim each of
// their words once (longest phrase first, no double counting).
UncertaintyReport compute_uncertainty(std::string_view caption,
                                      const HedgeLexicon& lexicon);

}  // namespace mapcap::metrics

#endif  // MAPCAP_METRICS_HPP_
