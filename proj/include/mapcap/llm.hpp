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

#ifndef MAPCAP_LLM_HPP_
#define MAPCAP_LLM_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcap/ingest.hpp"
#include "mapcap/retry.hpp"
#include "mapcap/workpool.hpp"

namespace mapcap::llm {

// One fully specified model request. Attachments are file paths, satellite
// image first, map tile second. A non-empty consolidation_inputs marks a
// merge request over previously generated captions.
struct PromptSpec {
  std::string sample_id;
  std::string system_text;
  std::string user_text;
  std::vector<std::string> attachments;
  int variant_index = 0;
  std::vector<std::string> consolidation_inputs;
};

enum class Aggregation { ConsolidateViaLlm, MajorityNounFilter };

std::string aggregation_name(Aggregation a);
Aggregation aggregation_from_name(const std::string& name);

struct EnsembleConfig {
  int n_prompts = 1;  // one of {1, 3, 5}
  Aggregation aggregation = Aggregation::ConsolidateViaLlm;
  uint64_t seed = 0;
};

struct CaptionBundle {
  std::string sample_id;
  std::vector<std::string> raw_responses;  // length n_prompts, "" = failed
  std::string final_caption;
  std::string model_id;
  std::vector<std::string> request_hashes;
};

void to_json(nlohmann::json& j, const CaptionBundle& b);
void from_json(const nlohmann::json& j, CaptionBundle& b);

struct BackendCapabilities {
  bool accepts_images = true;
  std::string model_id;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual BackendCapabilities capabilities() const = 0;
  // Returns caption text or throws BackendError. Must be safe to call from
  // multiple workers at once.
  virtual std::string complete(const PromptSpec& prompt) = 0;
};

int prompt_variant_count();

// Caption request for one sample: the metadata (category, location, lat/lon
// at 6 decimals, GSD) plus the instruction to cover landmarks, relative
// positions, sizes, colors and quantities. Variants reword and reorder, the
// embedded values stay identical. DomainError when variant_index is out of
// range.
PromptSpec build_prompt(const ingest::SampleRecord& sample,
                        const std::vector<std::string>& attachments,
                        int variant_index);

// Merge request over draft captions of one sample.
PromptSpec build_consolidation_prompt(const std::string& sample_id,
                                      const std::vector<std::string>& drafts);

// Deterministic stand-in for a vision model. Captions are synthesized from
// sample metadata plus names drawn from configured pools; invented names are
// injected with a seeded probability shaped by the map resolution and style
// parsed from the map attachment's filename. Output depends only on config
// and prompt content, never on call order.
struct MockBackendConfig {
  std::vector<std::string> landmark_names;
  std::vector<std::string> street_names;
  std::vector<std::string> fake_names;
  double default_hallucination_p = 0.2;
  std::map<int, double> per_resolution_p;           // resolution -> p
  std::map<std::string, double> per_style_multiplier;  // style slug -> factor
  uint64_t seed = 0;
  std::string model_id = "mock-vlm-1";
};

class MockBackend : public LlmBackend {
 public:
  explicit MockBackend(MockBackendConfig config);
  BackendCapabilities capabilities() const override;
  std::string complete(const PromptSpec& prompt) override;

 private:
  MockBackendConfig config_;
};

// Chat-completions-style HTTP client with inline base64 image payloads. The
// bearer token is read from the environment variable named by auth_env and
// never persisted anywhere.
struct HttpBackendConfig {
  std::string endpoint;  // full URL
  std::string model_id;
  std::string auth_env;
  nlohmann::json params;  // opaque decoding parameters, merged into requests
  int timeout_s = 120;
};

class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  BackendCapabilities capabilities() const override;
  std::string complete(const PromptSpec& prompt) override;

 private:
  HttpBackendConfig config_;
};

// Request/response store under cache_dir, one JSON file per request keyed by
// the content hash of the canonical request. Writes are atomic.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir);
  std::string key_for(const PromptSpec& prompt,
                      const std::string& model_id) const;
  std::optional<std::string> lookup(const std::string& key) const;
  void store(const std::string& key, const nlohmann::json& request_summary,
             const std::string& response, int attempts) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Counts logical backend calls; cache hits are free. Throws BudgetError once
// the limit is consumed. A call that ultimately fails still counts.
class RequestBudget {
 public:
  explicit RequestBudget(int64_t limit) : limit_(limit), used_(0) {}
  void charge();
  int64_t used() const { return used_.load(); }
  int64_t limit() const { return limit_; }

 private:
  int64_t limit_;
  std::atomic<int64_t> used_;
};

// Everything generate() needs besides the prompt. Owned by the caller;
// shared across workers.
struct GenerateContext {
  LlmBackend* backend = nullptr;
  const Cache* cache = nullptr;            // optional
  RequestBudget* budget = nullptr;         // optional
  workpool::RateLimiter* limiter = nullptr;  // optional
  retry::RetryPolicy retry;
  uint64_t seed = 0;
  std::atomic<int64_t> physical_calls{0};  // backend invocations, attempts included
};

// Cache-first captioning: returns the cached response when the request was
// seen before, otherwise charges the budget, calls the backend with bounded
// retries, persists request and response, and returns the caption.
std::string generate(const PromptSpec& prompt, GenerateContext& ctx);

// Runs n_prompts distinct prompt variants and aggregates. Proceeds when at
// least ceil(n/2) responses arrive, else EnsembleError. BudgetError always
// propagates.
CaptionBundle ensemble(const ingest::SampleRecord& sample,
                       const std::vector<std::string>& attachments,
                       const EnsembleConfig& cfg, GenerateContext& ctx);

}  // namespace mapcap::llm

#endif  // MAPCAP_LLM_HPP_
