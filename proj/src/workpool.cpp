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

#include "mapcap/workpool.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <thread>

namespace mapcap::workpool {

namespace {

std::atomic<bool> g_stop{false};

}  // namespace

void request_stop() { g_stop.store(true); }
void clear_stop() { g_stop.store(false); }
bool stop_requested() { return g_stop.load(); }

std::size_t run_all(const std::vector<std::function<void()>>& tasks,
                    int parallelism) {
  const int workers =
      std::max(1, std::min<int>(parallelism, static_cast<int>(tasks.size())));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      if (failed.load() || stop_requested()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
        done.fetch_add(1);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return done.load();
}

RateLimiter::RateLimiter(double per_second)
    : per_second_(per_second), next_slot_us_(0) {}

void RateLimiter::acquire() {
  if (per_second_ <= 0.0) return;
  const auto interval_us = static_cast<int64_t>(1e6 / per_second_);
  const auto now_us = std::chrono::duration_cast<std::chrono::microseconds>(
                          std::chrono::steady_clock::now().time_since_epoch())
                          .count();
  // Claim the next slot atomically; sleeping happens outside the CAS loop.
  int64_t slot = next_slot_us_.load();
  int64_t my_slot;
  do {
    my_slot = std::max(slot, now_us);
  } while (!next_slot_us_.compare_exchange_weak(slot, my_slot + interval_us));
  if (my_slot > now_us) {
    std::this_thread::sleep_for(std::chrono::microseconds(my_slot - now_us));
  }
}

}  // namespace mapcap::workpool
