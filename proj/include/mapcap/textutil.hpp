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

#ifndef MAPCAP_TEXTUTIL_HPP_
#define MAPCAP_TEXTUTIL_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mapcap::textutil {

// One decoded codepoint plus its position in the source byte string. Invalid
// UTF-8 decodes to U+FFFD one byte at a time so decoding is total.
struct Utf8Char {
  uint32_t cp;
  std::size_t offset;  // byte offset of the first byte
  std::size_t length;  // bytes consumed
};

std::vector<Utf8Char> decode_utf8(std::string_view s);
void append_utf8(std::string& out, uint32_t cp);

// Simple one-to-one lowercase covering ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Codepoints without a mapping pass through.
uint32_t to_lower(uint32_t cp);

// True when to_lower would change the codepoint, i.e. it is a cased capital.
bool is_upper(uint32_t cp);

bool is_ascii_digit(uint32_t cp);

// Letter test for tokenization. Conservative: known punctuation, digit,
// symbol and separator ranges are rejected; unknown high codepoints are
// treated as letters so scripts outside the tables still form tokens.
bool is_letter(uint32_t cp);

// Unicode whitespace (ASCII space/tab/newlines, NBSP, general punctuation
// spaces, ideographic space).
bool is_space(uint32_t cp);

// Compatibility fold: maps fullwidth forms, typographic quotes and dashes,
// ligatures and a few singletons to their plain equivalents. Appends zero or
// more codepoints to `out`.
void fold_compat(uint32_t cp, std::vector<uint32_t>& out);

// Lowercases a UTF-8 string with to_lower, leaving byte layout otherwise
// untouched.
std::string lower_copy(std::string_view s);

}  // namespace mapcap::textutil

#endif  // MAPCAP_TEXTUTIL_HPP_
