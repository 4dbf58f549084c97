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

#ifndef MAPCAP_RETRY_HPP_
#define MAPCAP_RETRY_HPP_

#include <cstdint>
#include <functional>
#include <string>

namespace mapcap::retry {

struct RetryPolicy {
  int max_attempts = 5;
  int base_ms = 500;
  int cap_ms = 60000;
};

// Runs `op` up to max_attempts times. A BackendError with retryable=true
// triggers an exponential-backoff sleep (seeded jitter in [delay/2, delay],
// capped at cap_ms) and another attempt; any other exception, or exhaustion,
// propagates. `label` tags the retry log lines; `seed` makes the jitter
// sequence reproducible. Returns the number of attempts actually made.
int run_with_retry(const std::function<void()>& op, const RetryPolicy& policy,
                   uint64_t seed, const std::string& label);

}  // namespace mapcap::retry

#endif  // MAPCAP_RETRY_HPP_
