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

#ifndef MAPCAP_WORKPOOL_HPP_
#define MAPCAP_WORKPOOL_HPP_

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace mapcap::workpool {

// Requests an orderly early stop; running tasks finish, queued ones are
// skipped. Wired to SIGINT by the CLI.
void request_stop();
void clear_stop();
bool stop_requested();

// Runs tasks[0..n) on `parallelism` threads (1 runs inline). Returns the
// number of tasks completed. The first exception thrown by any task is
// rethrown after all started tasks drain; remaining queued tasks are skipped
// once a failure or stop is seen.
std::size_t run_all(const std::vector<std::function<void()>>& tasks,
                    int parallelism);

// Simple steady-clock rate limiter; acquire() blocks so that acquisitions
// average at most `per_second`. A limit of 0 disables throttling.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second);
  void acquire();

 private:
  double per_second_;
  std::atomic<int64_t> next_slot_us_;
};

}  // namespace mapcap::workpool

#endif  // MAPCAP_WORKPOOL_HPP_
