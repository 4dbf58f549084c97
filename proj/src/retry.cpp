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

#include "mapcap/retry.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <thread>

#include "mapcap/errors.hpp"
#include "mapcap/log.hpp"

namespace mapcap::retry {

int run_with_retry(const std::function<void()>& op, const RetryPolicy& policy,
                   uint64_t seed, const std::string& label) {
  const int max_attempts = std::max(1, policy.max_attempts);
  std::mt19937_64 rng(seed);
  for (int attempt = 1;; ++attempt) {
    try {
      op();
      return attempt;
    } catch (const BackendError& e) {
      if (!e.retryable || attempt >= max_attempts) throw;
      // Exponential growth base_ms * 2^(attempt-1), clamped before the shift
      // can overflow, then jittered into [delay/2, delay].
      int64_t delay = policy.base_ms;
      for (int i = 1; i < attempt && delay < policy.cap_ms; ++i) delay *= 2;
      delay = std::min<int64_t>(delay, policy.cap_ms);
      const int64_t half = delay / 2;
      const int64_t jittered =
          half + (half > 0 ? static_cast<int64_t>(rng() % (half + 1)) : 0);
      log::event("retry", {{"label", label},
                           {"attempt", attempt},
                           {"sleep_ms", jittered},
                           {"error", e.what()}});
      std::this_thread::sleep_for(std::chrono::milliseconds(jittered));
    }
  }
}

}  // namespace mapcap::retry
