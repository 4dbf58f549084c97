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

#ifndef MAPCAP_DETRNG_HPP_
#define MAPCAP_DETRNG_HPP_

#include <cstddef>
#include <cstdint>

namespace mapcap {

// xorshift64*: identical output on every platform, unlike the distribution
// adapters in <random>.
class DetRng {
 public:
  explicit DetRng(uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

  uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Uniform pick in [0, n); modulo bias is irrelevant at pool sizes here.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(next() % n);
  }

 private:
  uint64_t state_;
};

}  // namespace mapcap

#endif  // MAPCAP_DETRNG_HPP_
