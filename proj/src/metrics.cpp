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

#include "mapcap/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mapcap/errors.hpp"
#include "mapcap/hashutil.hpp"
#include "mapcap/jsonio.hpp"
#include "mapcap/textutil.hpp"

namespace mapcap::metrics {

namespace {

namespace tu = mapcap::textutil;

// Lowercase words a capitalized sentence opener is assumed to be when it
// stands alone: determiners, auxiliaries, spatial adverbs, hedges, and the
// scene vocabulary overhead-imagery captions open with.
const std::set<std::string>& stoplist() {
  static const std::set<std::string> kWords = {
      // determiners, pronouns, quantifiers
      "the", "an", "this", "that", "these", "those", "there", "here", "it",
      "its", "they", "some", "any", "each", "every", "all", "both", "few",
      "many", "much", "several", "most", "more", "other", "another", "such",
      "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
      "ten", "no", "none", "either", "neither",
      // auxiliaries and light verbs
      "is", "are", "was", "were", "be", "been", "being", "has", "have", "had",
      "can", "could", "may", "might", "will", "would", "shall", "should",
      "must", "do", "does", "did", "seems", "appears", "looks",
      // prepositions, conjunctions, discourse adverbs
      "in", "on", "at", "by", "to", "from", "with", "without", "within",
      "near", "nearby", "beside", "between", "among", "around", "along",
      "across", "above", "below", "under", "over", "behind", "beyond",
      "toward", "towards", "through", "and", "or", "but", "while", "when",
      "where", "also", "however", "moreover", "overall", "additionally",
      "meanwhile", "finally", "furthermore", "then", "next",
      // directions and frame positions
      "north", "south", "east", "west", "northeast", "northwest", "southeast",
      "southwest", "left", "right", "center", "central", "upper", "lower",
      "middle",
      // hedges
      "possibly", "perhaps", "likely", "apparently", "presumably", "probably",
      "maybe", "seemingly",
      // scene vocabulary
      "snow", "fog", "rain", "clouds", "shadows", "water", "trees", "grass",
      "fields", "roads", "streets", "buildings", "houses", "warehouses",
      "rooftops", "cars", "trucks", "boats", "ships", "trains", "ferries",
      "planes", "aircraft", "cargo", "containers", "cranes", "docks", "rows",
      "columns", "clusters", "large", "small", "wide", "narrow", "long",
      "tall", "dense", "sparse", "empty", "full", "open", "closed",
      "circular", "rectangular", "curved", "straight", "intersecting",
      "parallel", "terraced", "paved", "visible", "seen", "shown", "located",
      "situated", "surrounded", "adjacent", "industrial", "residential",
      "commercial", "agricultural", "urban", "rural", "baseball", "soccer",
      "tennis"};
  return kWords;
}

// Lowercase words allowed to bridge two capitalized tokens inside one name.
const std::set<std::string>& connectors() {
  static const std::set<std::string> kWords = {"of", "the", "de",  "la",
                                               "du", "des", "am"};
  return kWords;
}

// Tokens that may join the next capitalized token across a period.
const std::set<std::string>& period_abbreviations() {
  static const std::set<std::string> kWords = {"st", "mt", "ft", "dr"};
  return kWords;
}

bool is_hyphen_cp(uint32_t cp) {
  return cp == '-' || (cp >= 0x2010 && cp <= 0x2015) || cp == 0x2212;
}

bool is_apostrophe_cp(uint32_t cp) {
  return cp == '\'' || cp == 0x2019 || cp == 0x02BC;
}

struct Token {
  std::size_t begin = 0;  // byte offset
  std::size_t end = 0;
  bool capitalized = false;
  bool sentence_initial = false;
  int letter_count = 0;
  std::string lower;  // case-folded text, apostrophes dropped
};

// Letter runs with internal apostrophes; everything else separates tokens.
std::vector<Token> tokenize(std::string_view text,
                            const std::vector<tu::Utf8Char>& chars) {
  std::vector<Token> tokens;
  bool at_sentence_start = true;
  std::size_t i = 0;
  while (i < chars.size()) {
    const uint32_t cp = chars[i].cp;
    if (!tu::is_letter(cp)) {
      if (cp == '.' || cp == '!' || cp == '?' || cp == '\n') {
        at_sentence_start = true;
      }
      ++i;
      continue;
    }
    Token t;
    t.begin = chars[i].offset;
    t.capitalized = tu::is_upper(cp);
    t.sentence_initial = at_sentence_start;
    std::size_t j = i;
    while (j < chars.size()) {
      if (tu::is_letter(chars[j].cp)) {
        ++t.letter_count;
        tu::append_utf8(t.lower, tu::to_lower(chars[j].cp));
        ++j;
        continue;
      }
      // Apostrophe stays inside the token only when letters follow.
      if (is_apostrophe_cp(chars[j].cp) && j + 1 < chars.size() &&
          tu::is_letter(chars[j + 1].cp)) {
        ++j;
        continue;
      }
      break;
    }
    t.end = chars[j - 1].offset + chars[j - 1].length;
    tokens.push_back(std::move(t));
    at_sentence_start = false;
    i = j;
  }
  (void)text;
  return tokens;
}

enum class Gap { SpaceOnly, Hyphen, Period, Other };

// Classifies the bytes between two adjacent tokens.
Gap classify_gap(const std::vector<tu::Utf8Char>& chars, std::size_t from_byte,
                 std::size_t to_byte) {
  bool saw_hyphen = false;
  bool saw_period = false;
  auto it = std::lower_bound(chars.begin(), chars.end(), from_byte,
                             [](const tu::Utf8Char& c, std::size_t off) {
                               return c.offset < off;
                             });
  for (; it != chars.end() && it->offset < to_byte; ++it) {
    const auto& c = *it;
    if (tu::is_space(c.cp)) continue;
    if (is_hyphen_cp(c.cp) && !saw_period) {
      saw_hyphen = true;
      continue;
    }
    if (c.cp == '.' && !saw_hyphen && !saw_period) {
      saw_period = true;
      continue;
    }
    return Gap::Other;
  }
  if (saw_period) return Gap::Period;
  if (saw_hyphen) return Gap::Hyphen;
  return Gap::SpaceOnly;
}

bool in_stoplist(const Token& t) { return stoplist().count(t.lower) > 0; }

}  // namespace

std::string match_mode_name(MatchMode m) {
  return m == MatchMode::Exact ? "exact" : "containment";
}

MatchMode match_mode_from_name(const std::string& name) {
  if (name == "exact") return MatchMode::Exact;
  if (name == "containment" || name == "word_boundary_containment") {
    return MatchMode::WordBoundaryContainment;
  }
  throw ValidationError("match_mode", "unknown match mode: " + name);
}

CandidateList extract_proper_nouns(std::string_view caption) {
  const auto chars = tu::decode_utf8(caption);
  const auto tokens = tokenize(caption, chars);
  CandidateList out;

  const auto gap_between = [&](std::size_t a, std::size_t b) {
    return classify_gap(chars, tokens[a].end, tokens[b].begin);
  };

  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!tokens[i].capitalized) {
      ++i;
      continue;
    }
    std::size_t start = i;
    std::size_t last = i;
    for (;;) {
      // Direct extension to the next capitalized token over a joinable gap.
      const std::size_t next = last + 1;
      if (next < tokens.size() && tokens[next].capitalized) {
        const Gap g = gap_between(last, next);
        const bool period_ok =
            g == Gap::Period && period_abbreviations().count(tokens[last].lower);
        if (g == Gap::SpaceOnly || g == Gap::Hyphen || period_ok) {
          last = next;
          continue;
        }
      }
      // Connector bridge: up to two lowercase connectors, landing on a
      // capitalized token, all across plain spaces.
      std::size_t c = last + 1;
      int used = 0;
      while (c < tokens.size() && used < 2 && !tokens[c].capitalized &&
             connectors().count(tokens[c].lower) &&
             gap_between(c - 1, c) == Gap::SpaceOnly) {
        ++used;
        ++c;
      }
      if (used > 0 && c < tokens.size() && tokens[c].capitalized &&
          gap_between(c - 1, c) == Gap::SpaceOnly) {
        last = c;
        continue;
      }
      break;
    }

    // A sentence opener that is ordinary vocabulary is a determiner, not a
    // name: alone it is dropped, before a longer run it is trimmed off.
    if (tokens[start].sentence_initial && in_stoplist(tokens[start])) {
      if (start == last) {
        i = last + 1;
        continue;
      }
      std::size_t trimmed = start + 1;
      while (trimmed <= last && !tokens[trimmed].capitalized) ++trimmed;
      start = trimmed;
    }
    // Bare initials ("X marks...") never stand as names on their own.
    if (start == last && tokens[start].letter_count <= 1) {
      i = last + 1;
      continue;
    }

    Candidate cand;
    cand.begin = tokens[start].begin;
    cand.end = tokens[last].end;
    cand.text = std::string(caption.substr(cand.begin, cand.end - cand.begin));
    cand.normalized = osmref::normalize_name(cand.text);
    out.entries.push_back(std::move(cand));
    i = last + 1;
  }
  return out;
}

namespace {

std::vector<std::string> split_words(const std::string& normalized) {
  std::vector<std::string> words;
  std::istringstream ss(normalized);
  std::string w;
  while (ss >> w) words.push_back(w);
  return words;
}

bool contiguous_subsequence(const std::vector<std::string>& needle,
                            const std::vector<std::string>& haystack) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) {
      return true;
    }
  }
  return false;
}

}  // namespace

FdrReport compute_fdr(const CandidateList& candidates,
                      const osmref::ReferenceList& refs, MatchMode mode) {
  FdrReport report;
  report.mode = mode;
  report.k = static_cast<int>(candidates.size());
  if (report.k == 0) {
    report.fdr = 0.0;
    report.vacuous = true;
    return report;
  }
  const std::set<std::string> ref_set(refs.entries.begin(), refs.entries.end());
  std::vector<std::vector<std::string>> ref_words;
  if (mode == MatchMode::WordBoundaryContainment) {
    ref_words.reserve(refs.entries.size());
    for (const auto& r : refs.entries) ref_words.push_back(split_words(r));
  }

  for (const auto& cand : candidates.entries) {
    bool hit = ref_set.count(cand.normalized) > 0;
    if (!hit && mode == MatchMode::WordBoundaryContainment) {
      const auto cand_words = split_words(cand.normalized);
      for (const auto& rw : ref_words) {
        if (contiguous_subsequence(cand_words, rw) ||
            contiguous_subsequence(rw, cand_words)) {
          hit = true;
          break;
        }
      }
    }
    if (hit) {
      ++report.hits;
    } else {
      report.misses.push_back(cand);
    }
  }
  // (k - hits) / k rather than 1 - hits/k: algebraically identical, but
  // exact in floating point for rational edge cases the tests pin down.
  report.fdr = static_cast<double>(report.k - report.hits) /
               static_cast<double>(report.k);
  return report;
}

void to_json(nlohmann::json& j, const FdrReport& r) {
  auto misses = nlohmann::json::array();
  for (const auto& m : r.misses) {
    misses.push_back({{"text", m.text},
                      {"begin", m.begin},
                      {"end", m.end},
                      {"normalized", m.normalized}});
  }
  j = nlohmann::json{{"fdr", r.fdr},
                     {"k", r.k},
                     {"hits", r.hits},
                     {"misses", misses},
                     {"vacuous", r.vacuous},
                     {"mode", match_mode_name(r.mode)}};
}

void from_json(const nlohmann::json& j, FdrReport& r) {
  r.fdr = j.at("fdr").get<double>();
  r.k = j.at("k").get<int>();
  r.hits = j.at("hits").get<int>();
  r.vacuous = j.at("vacuous").get<bool>();
  r.mode = match_mode_from_name(j.at("mode").get<std::string>());
  r.misses.clear();
  for (const auto& m : j.at("misses")) {
    Candidate c;
    c.text = m.at("text").get<std::string>();
    c.begin = m.at("begin").get<std::size_t>();
    c.end = m.at("end").get<std::size_t>();
    c.normalized = m.at("normalized").get<std::string>();
    r.misses.push_back(std::move(c));
  }
}

HedgeLexicon HedgeLexicon::load(const std::filesystem::path& path) {
  const std::string raw = jsonio::read_text_file(path);
  std::set<std::string> entries;
  std::istringstream ss(raw);
  std::string line;
  while (std::getline(ss, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.empty() || line[0] == '#') continue;
    entries.insert(tu::lower_copy(line));
  }
  if (entries.empty()) {
    throw ValidationError("lexicon", "hedge lexicon is empty: " + path.string());
  }
  HedgeLexicon lex;
  lex.entries.assign(entries.begin(), entries.end());
  lex.id = "sha256:" + hashutil::sha256_hex(raw);
  return lex;
}

HedgeLexicon HedgeLexicon::from_entries(const std::vector<std::string>& entries,
                                        const std::string& id) {
  std::set<std::string> unique;
  for (const auto& e : entries) unique.insert(tu::lower_copy(e));
  HedgeLexicon lex;
  lex.entries.assign(unique.begin(), unique.end());
  lex.id = id;
  return lex;
}

UncertaintyReport compute_uncertainty(std::string_view caption,
                                      const HedgeLexicon& lexicon) {
  if (lexicon.entries.empty()) {
    throw ValidationError("lexicon", "hedge lexicon must be non-empty");
  }
  UncertaintyReport report;
  report.lexicon_id = lexicon.id;

  // Plain alphabetic runs; hedge phrases match over token sequences.
  std::vector<std::string> tokens;
  const auto chars = tu::decode_utf8(caption);
  std::size_t i = 0;
  while (i < chars.size()) {
    if (!tu::is_letter(chars[i].cp)) {
      ++i;
      continue;
    }
    std::string word;
    while (i < chars.size() && tu::is_letter(chars[i].cp)) {
      tu::append_utf8(word, tu::to_lower(chars[i].cp));
      ++i;
    }
    tokens.push_back(std::move(word));
  }
  report.total_tokens = static_cast<int>(tokens.size());
  if (tokens.empty()) {
    report.vacuous = true;
    return report;
  }

  std::vector<std::vector<std::string>> phrases;
  phrases.reserve(lexicon.entries.size());
  for (const auto& e : lexicon.entries) phrases.push_back(split_words(e));
  // Longest phrases claim tokens first; a claimed token never recounts.
  std::stable_sort(phrases.begin(), phrases.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() > b.size();
                   });

  std::vector<bool> claimed(tokens.size(), false);
  for (const auto& phrase : phrases) {
    if (phrase.empty() || phrase.size() > tokens.size()) continue;
    for (std::size_t at = 0; at + phrase.size() <= tokens.size(); ++at) {
      bool ok = true;
      for (std::size_t k = 0; k < phrase.size(); ++k) {
        if (claimed[at + k] || tokens[at + k] != phrase[k]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < phrase.size(); ++k) claimed[at + k] = true;
      report.hedge_hits += static_cast<int>(phrase.size());
    }
  }
  report.uncertain_pct =
      100.0 * report.hedge_hits / static_cast<double>(report.total_tokens);
  return report;
}

void to_json(nlohmann::json& j, const UncertaintyReport& r) {
  j = nlohmann::json{{"uncertain_pct", r.uncertain_pct},
                     {"hedge_hits", r.hedge_hits},
                     {"total_tokens", r.total_tokens},
                     {"lexicon_id", r.lexicon_id},
                     {"vacuous", r.vacuous}};
}

void from_json(const nlohmann::json& j, UncertaintyReport& r) {
  r.uncertain_pct = j.at("uncertain_pct").get<double>();
  r.hedge_hits = j.at("hedge_hits").get<int>();
  r.total_tokens = j.at("total_tokens").get<int>();
  r.lexicon_id = j.at("lexicon_id").get<std::string>();
  r.vacuous = j.at("vacuous").get<bool>();
}

}  // namespace mapcap::metrics
