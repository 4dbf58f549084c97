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

#ifndef MAPCAP_HTTPUTIL_HPP_
#define MAPCAP_HTTPUTIL_HPP_

#include <string>

#include "mapcap/errors.hpp"

namespace mapcap::httputil {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // starts with '/', "?query" retained
};

// Splits a full URL into the client base and request path. Throws
// ValidationError when the scheme marker is missing.
inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("endpoint", "URL lacks a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

// True for transient HTTP statuses worth another attempt.
inline bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace mapcap::httputil

#endif  // MAPCAP_HTTPUTIL_HPP_
