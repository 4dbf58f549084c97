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

#ifndef MAPCAP_TESTS_TEST_SUPPORT_HPP_
#define MAPCAP_TESTS_TEST_SUPPORT_HPP_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace testsupport {

// Root of the committed test fixtures, injected by the build.
inline std::filesystem::path fixtures_dir() {
  const char* v = std::getenv("MAPCAP_FIXTURES");
  if (v == nullptr || *v == '\0') {
    throw std::runtime_error("MAPCAP_FIXTURES is not set");
  }
  return std::filesystem::path(v);
}

inline std::filesystem::path data_dir() {
  const char* v = std::getenv("MAPCAP_DATA");
  if (v == nullptr || *v == '\0') {
    throw std::runtime_error("MAPCAP_DATA is not set");
  }
  return std::filesystem::path(v);
}

// Fresh directory under the system temp root, removed on scope exit.
class TempDir {
 public:
  TempDir() {
    const auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    for (int i = 0; i < 64; ++i) {
      auto candidate =
          base / ("mapcap_test_" + std::to_string(rng()));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = std::move(candidate);
        return;
      }
    }
    throw std::runtime_error("cannot create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const {
    return path_ / rel;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + p.string());
  }
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& p,
                       const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + p.string());
  }
  out << content;
}

}  // namespace testsupport

#endif  // MAPCAP_TESTS_TEST_SUPPORT_HPP_
