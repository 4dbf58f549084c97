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

#ifndef MAPCAP_CONFIG_HPP_
#define MAPCAP_CONFIG_HPP_

// Typed run configuration. One JSON file describes a whole run: paths, map
// request shape, model backend, ensemble and metric options, and the
// ablation axes. Command-line overrides land before validation and hashing,
// so config_hash always covers the configuration that actually executed.
// Path values stay as written (the hash must not depend on where the tree
// is checked out); resolve() anchors them to the config file's directory.
//
// Secrets never appear here. The config names environment variables
// (token_env, auth_env); only those variables' values authenticate.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcap/ablate.hpp"
#include "mapcap/llm.hpp"
#include "mapcap/metrics.hpp"
#include "mapcap/retry.hpp"
#include "mapcap/style.hpp"

namespace mapcap::config {

struct PathsConfig {
  std::string corpus_dir;
  std::string cache_dir;
  std::string output_dir;
  std::string osm_extract;  // offline OSM interchange document
  std::string hedge_lexicon;
};

struct TilesConfig {
  std::string endpoint_template;
  std::string token_env;
  std::map<std::string, std::string> styles;  // slug -> provider style id
  std::string style = "landmarks-only";       // dataset operating point
  int resolution_px = 1024;
  int zoom_offset = 0;
};

struct LlmSection {
  std::string backend = "mock";  // "mock" or "http"
  std::string endpoint;
  std::string model_id = "mock-vlm-1";
  std::string auth_env;
  nlohmann::json params = nlohmann::json::object();
  int timeout_s = 120;
};

struct EnsembleSection {
  int n_prompts = 3;
  std::string aggregation = "consolidate";
};

struct OsmSection {
  std::vector<std::string> tag_keys;
  std::string overpass_endpoint;  // empty = offline, read paths.osm_extract
};

struct AblateSection {
  std::vector<int> resolutions;
  std::vector<std::string> styles;  // slugs
  std::vector<int> n_prompts;
  int bootstrap_resamples = 1000;
};

struct RuntimeSection {
  int parallelism = 1;
  double rate_limit_per_sec = 0.0;
  retry::RetryPolicy retry;
};

struct MetricsSection {
  std::string match_mode = "exact";
};

struct RunConfig {
  uint64_t seed = 0;
  PathsConfig paths;
  TilesConfig tiles;
  LlmSection llm_cfg;
  EnsembleSection ensemble;
  llm::MockBackendConfig mock;  // seed and model_id filled from above
  OsmSection osm;
  AblateSection ablate_cfg;
  int64_t budget_max_calls = -1;  // logical model calls; -1 = unlimited
  RuntimeSection runtime;
  MetricsSection metrics_cfg;

  std::filesystem::path base_dir;  // config file directory
  std::string config_hash;         // sha256 of the canonical effective form

  // Path fields relative to the config file; absolute ones pass through.
  std::filesystem::path resolve(const std::string& p) const;

  MapStyleVariant style_variant() const;       // tiles.style parsed
  metrics::MatchMode match_mode() const;       // metrics parsed
  llm::Aggregation aggregation() const;        // ensemble parsed
  ablate::AblationAxes ablation_axes() const;  // ablate section parsed
  MapStyle map_style_for(MapStyleVariant v) const;
};

// Command-line knobs that override the file before hashing.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<int64_t> budget;
  std::optional<int> parallelism;
  std::optional<std::string> style;
  std::optional<int> resolution_px;
  std::optional<int> n_prompts;
  std::optional<int> zoom_offset;
};

// The complete configuration as one canonical JSON document; hashing input.
nlohmann::json effective_json(const RunConfig& cfg);

// Builds a config from already-parsed JSON. `base_dir` anchors relative
// paths. ValidationError (with a dotted field path) on any contract breach.
RunConfig config_from_json(const nlohmann::json& j,
                           const std::filesystem::path& base_dir,
                           const Overrides& overrides = {});

// Reads, overrides, validates and hashes a config file.
RunConfig load_config(const std::filesystem::path& file,
                      const Overrides& overrides = {});

}  // namespace mapcap::config

#endif  // MAPCAP_CONFIG_HPP_
