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

#ifndef MAPCAP_LOG_HPP_
#define MAPCAP_LOG_HPP_

#include <string_view>

#include <json.hpp>

namespace mapcap::log {

// Emits one JSON object per line on stderr: {"event": <name>, ...fields}.
// Thread safe; lines are never interleaved.
void event(std::string_view name, const nlohmann::json& fields = {});

// Silences or restores output; tests use this to keep stderr clean.
void set_enabled(bool enabled);
bool enabled();

}  // namespace mapcap::log

#endif  // MAPCAP_LOG_HPP_
