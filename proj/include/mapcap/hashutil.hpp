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

#ifndef MAPCAP_HASHUTIL_HPP_
#define MAPCAP_HASHUTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mapcap::hashutil {

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

// SHA-256 of a file's contents. Throws IoError when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

// FNV-1a over bytes, for cheap deterministic seed derivation. Not a
// cryptographic hash.
uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

// Folds a 64-bit value into a running FNV-1a state byte by byte.
uint64_t fnv1a64_mix(uint64_t state, uint64_t value);

}  // namespace mapcap::hashutil

#endif  // MAPCAP_HASHUTIL_HPP_
