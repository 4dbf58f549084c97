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

#ifndef MAPCAP_JSONIO_HPP_
#define MAPCAP_JSONIO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace mapcap::jsonio {

std::string read_text_file(const std::filesystem::path& path);

// Parses the whole file. IoError when unreadable; ParseError (with byte
// offset) when the content is not JSON.
nlohmann::json read_json_file(const std::filesystem::path& path);

// Parses a string. ParseError carries the byte offset nlohmann reports.
nlohmann::json parse_json(std::string_view text, const std::string& what);

// Writes via a temp file in the same directory followed by rename, so
// readers never observe a half-written file.
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Stable serialization used for hashing and manifests: sorted keys (the
// default object representation), no whitespace, shortest-round-trip floats.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace mapcap::jsonio

#endif  // MAPCAP_JSONIO_HPP_
