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

#include "mapcap/config.hpp"

#include <cctype>
#include <set>
#include <string>

#include "mapcap/errors.hpp"
#include "mapcap/hashutil.hpp"
#include "mapcap/jsonio.hpp"
#include "mapcap/osmref.hpp"

namespace mapcap::config {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string get_string(const json& j, const char* key, const std::string& path,
                       std::optional<std::string> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    throw ValidationError(path, "missing required field");
  }
  if (!v->is_string()) throw ValidationError(path, "expected a string");
  return v->get<std::string>();
}

int64_t get_int(const json& j, const char* key, const std::string& path,
                std::optional<int64_t> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    throw ValidationError(path, "missing required field");
  }
  if (!v->is_number_integer()) {
    throw ValidationError(path, "expected an integer");
  }
  return v->get<int64_t>();
}

double get_number(const json& j, const char* key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    throw ValidationError(path, "missing required field");
  }
  if (!v->is_number()) throw ValidationError(path, "expected a number");
  return v->get<double>();
}

std::vector<std::string> get_string_list(const json& j, const char* key,
                                         const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) throw ValidationError(path, "missing required field");
  if (!v->is_array()) throw ValidationError(path, "expected an array");
  std::vector<std::string> out;
  for (const json& e : *v) {
    if (!e.is_string()) throw ValidationError(path, "expected string entries");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<int> get_int_list(const json& j, const char* key,
                              const std::string& path) {
  const json* v = find(j, key);
  if (v == nullptr) throw ValidationError(path, "missing required field");
  if (!v->is_array()) throw ValidationError(path, "expected an array");
  std::vector<int> out;
  for (const json& e : *v) {
    if (!e.is_number_integer()) {
      throw ValidationError(path, "expected integer entries");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

void require_env_name(const std::string& name, const std::string& path) {
  if (name.empty()) {
    throw ValidationError(path, "empty environment variable name");
  }
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
    throw ValidationError(path, "not an environment variable name: " + name);
  }
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
      throw ValidationError(path, "not an environment variable name: " + name);
    }
  }
}

void require_slug(const std::string& slug, const std::string& path) {
  if (!style_from_slug(slug)) {
    throw ValidationError(path, "unknown style slug '" + slug + "'");
  }
}

void require_in(int value, std::initializer_list<int> allowed,
                const std::string& path) {
  for (int a : allowed) {
    if (value == a) return;
  }
  std::string opts;
  for (int a : allowed) {
    if (!opts.empty()) opts += ", ";
    opts += std::to_string(a);
  }
  throw ValidationError(path, std::to_string(value) + " not in {" + opts + "}");
}

void require_probability(double p, const std::string& path) {
  if (p < 0.0 || p > 1.0) {
    throw ValidationError(path, "probability outside [0, 1]");
  }
}

PathsConfig parse_paths(const json& j) {
  const json* p = find(j, "paths");
  if (p == nullptr) throw ValidationError("paths", "missing required field");
  PathsConfig out;
  out.corpus_dir = get_string(*p, "corpus_dir", "paths.corpus_dir");
  out.cache_dir = get_string(*p, "cache_dir", "paths.cache_dir");
  out.output_dir = get_string(*p, "output_dir", "paths.output_dir");
  out.osm_extract =
      get_string(*p, "osm_extract", "paths.osm_extract", std::string());
  out.hedge_lexicon = get_string(*p, "hedge_lexicon", "paths.hedge_lexicon");
  if (out.corpus_dir.empty()) {
    throw ValidationError("paths.corpus_dir", "empty path");
  }
  if (out.cache_dir.empty()) {
    throw ValidationError("paths.cache_dir", "empty path");
  }
  if (out.output_dir.empty()) {
    throw ValidationError("paths.output_dir", "empty path");
  }
  if (out.hedge_lexicon.empty()) {
    throw ValidationError("paths.hedge_lexicon", "empty path");
  }
  return out;
}

TilesConfig parse_tiles(const json& j) {
  const json* t = find(j, "tiles");
  if (t == nullptr) throw ValidationError("tiles", "missing required field");
  TilesConfig out;
  out.endpoint_template =
      get_string(*t, "endpoint_template", "tiles.endpoint_template");
  for (const char* ph : {"{lon}", "{lat}", "{zoom}", "{w}", "{h}", "{style}"}) {
    if (out.endpoint_template.find(ph) == std::string::npos) {
      throw ValidationError("tiles.endpoint_template",
                            std::string("missing placeholder ") + ph);
    }
  }
  out.token_env = get_string(*t, "token_env", "tiles.token_env");
  require_env_name(out.token_env, "tiles.token_env");

  const json* styles = find(*t, "styles");
  if (styles == nullptr || !styles->is_object() || styles->empty()) {
    throw ValidationError("tiles.styles", "expected a non-empty object");
  }
  std::set<std::string> ids;
  for (const auto& [slug, id] : styles->items()) {
    require_slug(slug, "tiles.styles");
    if (!id.is_string() || id.get<std::string>().empty()) {
      throw ValidationError("tiles.styles." + slug,
                            "expected a style id string");
    }
    if (!ids.insert(id.get<std::string>()).second) {
      throw ValidationError("tiles.styles." + slug,
                            "style id '" + id.get<std::string>() +
                                "' assigned to two slugs");
    }
    out.styles[slug] = id.get<std::string>();
  }

  out.style =
      get_string(*t, "style", "tiles.style", std::string("landmarks-only"));
  out.resolution_px = static_cast<int>(
      get_int(*t, "resolution", "tiles.resolution", out.resolution_px));
  out.zoom_offset = static_cast<int>(
      get_int(*t, "zoom_offset", "tiles.zoom_offset", out.zoom_offset));
  return out;
}

LlmSection parse_llm(const json& j) {
  const json* m = find(j, "llm");
  if (m == nullptr) throw ValidationError("llm", "missing required field");
  LlmSection out;
  out.backend = get_string(*m, "backend", "llm.backend", std::string("mock"));
  if (out.backend != "mock" && out.backend != "http") {
    throw ValidationError(
        "llm.backend", "expected 'mock' or 'http', got '" + out.backend + "'");
  }
  out.endpoint = get_string(*m, "endpoint", "llm.endpoint", std::string());
  out.model_id =
      get_string(*m, "model_id", "llm.model_id", std::string("mock-vlm-1"));
  out.auth_env = get_string(*m, "auth_env", "llm.auth_env", std::string());
  if (const json* p = find(*m, "params")) {
    if (!p->is_object()) throw ValidationError("llm.params", "expected an object");
    out.params = *p;
  }
  out.timeout_s =
      static_cast<int>(get_int(*m, "timeout_s", "llm.timeout_s", 120));
  if (out.timeout_s < 1) throw ValidationError("llm.timeout_s", "must be >= 1");
  return out;
}

EnsembleSection parse_ensemble(const json& j) {
  EnsembleSection out;
  const json* e = find(j, "ensemble");
  if (e == nullptr) return out;
  out.n_prompts = static_cast<int>(
      get_int(*e, "n_prompts", "ensemble.n_prompts", out.n_prompts));
  out.aggregation = get_string(*e, "aggregation", "ensemble.aggregation",
                               out.aggregation);
  return out;
}

llm::MockBackendConfig parse_mock(const json& j) {
  llm::MockBackendConfig out;
  const json* m = find(j, "mock");
  if (m == nullptr) return out;
  out.landmark_names =
      get_string_list(*m, "landmark_names", "mock.landmark_names");
  out.street_names = get_string_list(*m, "street_names", "mock.street_names");
  out.fake_names = get_string_list(*m, "fake_names", "mock.fake_names");
  if (const json* h = find(*m, "hallucination")) {
    out.default_hallucination_p = get_number(
        *h, "default", "mock.hallucination.default", out.default_hallucination_p);
    require_probability(out.default_hallucination_p,
                        "mock.hallucination.default");
    if (const json* pr = find(*h, "per_resolution")) {
      for (const auto& [key, value] : pr->items()) {
        int res = 0;
        try {
          res = std::stoi(key);
        } catch (const std::exception&) {
          throw ValidationError("mock.hallucination.per_resolution",
                                "key '" + key + "' is not a resolution");
        }
        require_in(res, {256, 512, 1024}, "mock.hallucination.per_resolution");
        if (!value.is_number()) {
          throw ValidationError("mock.hallucination.per_resolution." + key,
                                "expected a number");
        }
        const double p = value.get<double>();
        require_probability(p, "mock.hallucination.per_resolution." + key);
        out.per_resolution_p[res] = p;
      }
    }
    if (const json* ps = find(*h, "per_style")) {
      for (const auto& [slug, value] : ps->items()) {
        require_slug(slug, "mock.hallucination.per_style");
        if (!value.is_number()) {
          throw ValidationError("mock.hallucination.per_style." + slug,
                                "expected a number");
        }
        const double f = value.get<double>();
        if (f < 0.0) {
          throw ValidationError("mock.hallucination.per_style." + slug,
                                "negative multiplier");
        }
        out.per_style_multiplier[slug] = f;
      }
    }
  }
  return out;
}

OsmSection parse_osm(const json& j) {
  OsmSection out;
  out.tag_keys = osmref::kDefaultTagKeys;
  const json* o = find(j, "osm");
  if (o == nullptr) return out;
  if (find(*o, "tag_keys") != nullptr) {
    out.tag_keys = get_string_list(*o, "tag_keys", "osm.tag_keys");
    if (out.tag_keys.empty()) {
      throw ValidationError("osm.tag_keys", "empty tag key list");
    }
  }
  out.overpass_endpoint = get_string(*o, "overpass_endpoint",
                                     "osm.overpass_endpoint", std::string());
  if (!out.overpass_endpoint.empty() &&
      out.overpass_endpoint.find("://") == std::string::npos) {
    throw ValidationError("osm.overpass_endpoint", "expected a full URL");
  }
  return out;
}

AblateSection parse_ablate(const json& j) {
  AblateSection out;
  const json* a = find(j, "ablate");
  if (a == nullptr) {
    out.resolutions = {256, 512, 1024};
    for (const auto v : kAllStyleVariants) out.styles.push_back(style_slug(v));
    out.n_prompts = {1, 3, 5};
    return out;
  }
  out.resolutions = get_int_list(*a, "resolutions", "ablate.resolutions");
  if (out.resolutions.empty()) {
    throw ValidationError("ablate.resolutions", "empty axis");
  }
  std::set<int> seen_res;
  for (int r : out.resolutions) {
    require_in(r, {256, 512, 1024}, "ablate.resolutions");
    if (!seen_res.insert(r).second) {
      throw ValidationError("ablate.resolutions", "duplicate value");
    }
  }
  out.styles = get_string_list(*a, "styles", "ablate.styles");
  if (out.styles.empty()) throw ValidationError("ablate.styles", "empty axis");
  std::set<std::string> seen_style;
  for (const std::string& s : out.styles) {
    require_slug(s, "ablate.styles");
    if (!seen_style.insert(s).second) {
      throw ValidationError("ablate.styles", "duplicate value");
    }
  }
  out.n_prompts = get_int_list(*a, "n_prompts", "ablate.n_prompts");
  if (out.n_prompts.empty()) {
    throw ValidationError("ablate.n_prompts", "empty axis");
  }
  std::set<int> seen_n;
  for (int n : out.n_prompts) {
    require_in(n, {1, 3, 5}, "ablate.n_prompts");
    if (!seen_n.insert(n).second) {
      throw ValidationError("ablate.n_prompts", "duplicate value");
    }
  }
  out.bootstrap_resamples = static_cast<int>(get_int(
      *a, "bootstrap_resamples", "ablate.bootstrap_resamples", 1000));
  if (out.bootstrap_resamples < 1) {
    throw ValidationError("ablate.bootstrap_resamples", "must be >= 1");
  }
  return out;
}

RuntimeSection parse_runtime(const json& j) {
  RuntimeSection out;
  const json* r = find(j, "runtime");
  if (r == nullptr) return out;
  out.parallelism = static_cast<int>(
      get_int(*r, "parallelism", "runtime.parallelism", out.parallelism));
  out.rate_limit_per_sec =
      get_number(*r, "rate_limit_per_sec", "runtime.rate_limit_per_sec",
                 out.rate_limit_per_sec);
  if (out.rate_limit_per_sec < 0.0) {
    throw ValidationError("runtime.rate_limit_per_sec", "must be >= 0");
  }
  if (const json* rt = find(*r, "retry")) {
    out.retry.max_attempts = static_cast<int>(get_int(
        *rt, "max_attempts", "runtime.retry.max_attempts",
        out.retry.max_attempts));
    if (out.retry.max_attempts < 1) {
      throw ValidationError("runtime.retry.max_attempts", "must be >= 1");
    }
    out.retry.base_ms = static_cast<int>(
        get_int(*rt, "base_ms", "runtime.retry.base_ms", out.retry.base_ms));
    if (out.retry.base_ms < 0) {
      throw ValidationError("runtime.retry.base_ms", "must be >= 0");
    }
    out.retry.cap_ms = static_cast<int>(
        get_int(*rt, "cap_ms", "runtime.retry.cap_ms", out.retry.cap_ms));
    if (out.retry.cap_ms < out.retry.base_ms) {
      throw ValidationError("runtime.retry.cap_ms", "cap below base delay");
    }
  }
  return out;
}

// Every slug the run can render must map to a provider style id.
void check_style_coverage(const RunConfig& cfg) {
  const auto need = [&cfg](const std::string& slug, const std::string& path) {
    if (cfg.tiles.styles.count(slug) == 0) {
      throw ValidationError(
          path, "style '" + slug + "' has no entry in tiles.styles");
    }
  };
  need(cfg.tiles.style, "tiles.style");
  for (const std::string& s : cfg.ablate_cfg.styles) {
    need(s, "ablate.styles");
  }
}

}  // namespace

fs::path RunConfig::resolve(const std::string& p) const {
  const fs::path path(p);
  if (path.is_absolute()) return path;
  return base_dir / path;
}

MapStyleVariant RunConfig::style_variant() const {
  return *style_from_slug(tiles.style);
}

metrics::MatchMode RunConfig::match_mode() const {
  return metrics::match_mode_from_name(metrics_cfg.match_mode);
}

llm::Aggregation RunConfig::aggregation() const {
  return llm::aggregation_from_name(ensemble.aggregation);
}

ablate::AblationAxes RunConfig::ablation_axes() const {
  ablate::AblationAxes axes;
  axes.resolutions = ablate_cfg.resolutions;
  for (const std::string& s : ablate_cfg.styles) {
    axes.styles.push_back(*style_from_slug(s));
  }
  axes.ensemble_sizes = ablate_cfg.n_prompts;
  return axes;
}

MapStyle RunConfig::map_style_for(MapStyleVariant v) const {
  const auto it = tiles.styles.find(style_slug(v));
  if (it == tiles.styles.end()) {
    throw ValidationError("tiles.styles",
                          "style '" + style_slug(v) + "' not configured");
  }
  return MapStyle{v, it->second};
}

json effective_json(const RunConfig& cfg) {
  json per_res = json::object();
  for (const auto& [res, p] : cfg.mock.per_resolution_p) {
    per_res[std::to_string(res)] = p;
  }
  json per_style = json::object();
  for (const auto& [slug, f] : cfg.mock.per_style_multiplier) {
    per_style[slug] = f;
  }
  return json{
      {"seed", cfg.seed},
      {"paths",
       {{"corpus_dir", cfg.paths.corpus_dir},
        {"cache_dir", cfg.paths.cache_dir},
        {"output_dir", cfg.paths.output_dir},
        {"osm_extract", cfg.paths.osm_extract},
        {"hedge_lexicon", cfg.paths.hedge_lexicon}}},
      {"tiles",
       {{"endpoint_template", cfg.tiles.endpoint_template},
        {"token_env", cfg.tiles.token_env},
        {"styles", cfg.tiles.styles},
        {"style", cfg.tiles.style},
        {"resolution", cfg.tiles.resolution_px},
        {"zoom_offset", cfg.tiles.zoom_offset}}},
      {"llm",
       {{"backend", cfg.llm_cfg.backend},
        {"endpoint", cfg.llm_cfg.endpoint},
        {"model_id", cfg.llm_cfg.model_id},
        {"auth_env", cfg.llm_cfg.auth_env},
        {"params", cfg.llm_cfg.params},
        {"timeout_s", cfg.llm_cfg.timeout_s}}},
      {"ensemble",
       {{"n_prompts", cfg.ensemble.n_prompts},
        {"aggregation", cfg.ensemble.aggregation}}},
      {"mock",
       {{"landmark_names", cfg.mock.landmark_names},
        {"street_names", cfg.mock.street_names},
        {"fake_names", cfg.mock.fake_names},
        {"hallucination",
         {{"default", cfg.mock.default_hallucination_p},
          {"per_resolution", per_res},
          {"per_style", per_style}}}}},
      {"osm",
       {{"tag_keys", cfg.osm.tag_keys},
        {"overpass_endpoint", cfg.osm.overpass_endpoint}}},
      {"ablate",
       {{"resolutions", cfg.ablate_cfg.resolutions},
        {"styles", cfg.ablate_cfg.styles},
        {"n_prompts", cfg.ablate_cfg.n_prompts},
        {"bootstrap_resamples", cfg.ablate_cfg.bootstrap_resamples}}},
      {"budget", {{"max_backend_calls", cfg.budget_max_calls}}},
      {"runtime",
       {{"parallelism", cfg.runtime.parallelism},
        {"rate_limit_per_sec", cfg.runtime.rate_limit_per_sec},
        {"retry",
         {{"max_attempts", cfg.runtime.retry.max_attempts},
          {"base_ms", cfg.runtime.retry.base_ms},
          {"cap_ms", cfg.runtime.retry.cap_ms}}}}},
      {"metrics", {{"match_mode", cfg.metrics_cfg.match_mode}}}};
}

RunConfig config_from_json(const json& j, const fs::path& base_dir,
                           const Overrides& overrides) {
  if (!j.is_object()) {
    throw ValidationError("document", "config root must be an object");
  }
  RunConfig cfg;
  const int64_t seed = get_int(j, "seed", "seed", 0);
  if (seed < 0) throw ValidationError("seed", "must be >= 0");
  cfg.seed = static_cast<uint64_t>(seed);
  cfg.paths = parse_paths(j);
  cfg.tiles = parse_tiles(j);
  cfg.llm_cfg = parse_llm(j);
  cfg.ensemble = parse_ensemble(j);
  cfg.mock = parse_mock(j);
  cfg.osm = parse_osm(j);
  cfg.ablate_cfg = parse_ablate(j);
  if (const json* b = find(j, "budget")) {
    cfg.budget_max_calls =
        get_int(*b, "max_backend_calls", "budget.max_backend_calls", -1);
  }
  cfg.runtime = parse_runtime(j);
  if (const json* m = find(j, "metrics")) {
    cfg.metrics_cfg.match_mode = get_string(*m, "match_mode",
                                            "metrics.match_mode",
                                            cfg.metrics_cfg.match_mode);
  }

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.backend) cfg.llm_cfg.backend = *overrides.backend;
  if (overrides.budget) cfg.budget_max_calls = *overrides.budget;
  if (overrides.parallelism) cfg.runtime.parallelism = *overrides.parallelism;
  if (overrides.style) cfg.tiles.style = *overrides.style;
  if (overrides.resolution_px) cfg.tiles.resolution_px = *overrides.resolution_px;
  if (overrides.n_prompts) cfg.ensemble.n_prompts = *overrides.n_prompts;
  if (overrides.zoom_offset) cfg.tiles.zoom_offset = *overrides.zoom_offset;

  require_slug(cfg.tiles.style, "tiles.style");
  require_in(cfg.tiles.resolution_px, {256, 512, 1024}, "tiles.resolution");
  require_in(cfg.ensemble.n_prompts, {1, 3, 5}, "ensemble.n_prompts");
  llm::aggregation_from_name(cfg.ensemble.aggregation);
  metrics::match_mode_from_name(cfg.metrics_cfg.match_mode);
  if (cfg.llm_cfg.backend != "mock" && cfg.llm_cfg.backend != "http") {
    throw ValidationError("llm.backend", "expected 'mock' or 'http', got '" +
                                             cfg.llm_cfg.backend + "'");
  }
  if (cfg.llm_cfg.backend == "http") {
    if (cfg.llm_cfg.endpoint.find("://") == std::string::npos) {
      throw ValidationError("llm.endpoint", "http backend needs a full URL");
    }
    require_env_name(cfg.llm_cfg.auth_env, "llm.auth_env");
  }
  if (cfg.llm_cfg.backend == "mock") {
    if (cfg.mock.landmark_names.empty() || cfg.mock.street_names.empty() ||
        cfg.mock.fake_names.empty()) {
      throw ValidationError(
          "mock", "mock backend needs landmark, street and fake name pools");
    }
  }
  if (cfg.budget_max_calls < -1) {
    throw ValidationError("budget.max_backend_calls", "must be >= -1");
  }
  if (cfg.runtime.parallelism < 1) {
    throw ValidationError("runtime.parallelism", "must be >= 1");
  }
  check_style_coverage(cfg);

  cfg.mock.seed = cfg.seed;
  cfg.mock.model_id = cfg.llm_cfg.model_id;
  cfg.base_dir = base_dir;
  cfg.config_hash =
      hashutil::sha256_hex(jsonio::canonical_dump(effective_json(cfg)));
  return cfg;
}

RunConfig load_config(const fs::path& file, const Overrides& overrides) {
  const json j = jsonio::read_json_file(file);
  fs::path base = file.parent_path();
  if (base.empty()) base = ".";
  return config_from_json(j, base, overrides);
}

}  // namespace mapcap::config
