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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "mapcap/config.hpp"
#include "mapcap/errors.hpp"
#include "mapcap/osmref.hpp"
#include "test_support.hpp"

using namespace mapcap;
using namespace mapcap::config;
using nlohmann::json;

namespace {

std::filesystem::path fixture_config() {
  return testsupport::fixtures_dir() / "config" / "fixture.json";
}

// Smallest document that passes validation with the mock backend.
json valid_doc() {
  return json{
      {"paths",
       {{"corpus_dir", "corpus"},
        {"cache_dir", "cache"},
        {"output_dir", "out"},
        {"hedge_lexicon", "hedges.txt"}}},
      {"tiles",
       {{"endpoint_template",
         "https://maps.test/{style}/static/{lon},{lat},{zoom}/{w}x{h}"},
        {"token_env", "MAP_TOKEN"},
        {"styles",
         {{"all-labels", "prov/all"},
          {"landmarks-only", "prov/landmarks"},
          {"streets-only", "prov/streets"},
          {"no-labels", "prov/none"}}}}},
      {"llm", json::object()},
      {"mock",
       {{"landmark_names", {"Parc Central"}},
        {"street_names", {"Rue A"}},
        {"fake_names", {"Gran Pavilion"}}}}};
}

void expect_invalid(const json& doc, const std::string& field) {
  try {
    config_from_json(doc, ".");
    FAIL("expected ValidationError for field " << field);
  } catch (const ValidationError& e) {
    CHECK(e.field == field);
  }
}

}  // namespace

TEST_CASE("the reference config file loads with every section bound") {
  const auto cfg = load_config(fixture_config());
  CHECK(cfg.seed == 7);
  CHECK(cfg.paths.corpus_dir == "../corpus");
  CHECK(cfg.tiles.style == "landmarks-only");
  CHECK(cfg.tiles.resolution_px == 1024);
  CHECK(cfg.tiles.zoom_offset == 0);
  CHECK(cfg.tiles.token_env == "MAPCAP_MAP_TOKEN");
  CHECK(cfg.tiles.styles.size() == 4);
  CHECK(cfg.llm_cfg.backend == "mock");
  CHECK(cfg.llm_cfg.model_id == "mock-vlm-1");
  CHECK(cfg.ensemble.n_prompts == 3);
  CHECK(cfg.ensemble.aggregation == "consolidate");
  CHECK(cfg.mock.landmark_names.size() == 4);
  CHECK(cfg.mock.street_names.size() == 2);
  CHECK(cfg.mock.fake_names.size() == 6);
  CHECK(cfg.mock.default_hallucination_p == 0.2);
  CHECK(cfg.mock.per_resolution_p.at(256) == 0.4);
  CHECK(cfg.mock.per_resolution_p.at(1024) == 0.1);
  CHECK(cfg.mock.per_style_multiplier.at("all-labels") == 1.0);
  CHECK(cfg.osm.tag_keys == osmref::kDefaultTagKeys);
  CHECK(cfg.osm.overpass_endpoint.empty());
  CHECK(cfg.ablate_cfg.resolutions == std::vector<int>{256, 512, 1024});
  CHECK(cfg.ablate_cfg.styles.size() == 4);
  CHECK(cfg.ablate_cfg.n_prompts == std::vector<int>{1, 3, 5});
  CHECK(cfg.ablate_cfg.bootstrap_resamples == 1000);
  CHECK(cfg.budget_max_calls == 200000);
  CHECK(cfg.runtime.parallelism == 2);
  CHECK(cfg.runtime.retry.max_attempts == 5);
  CHECK(cfg.runtime.retry.base_ms == 1);
  CHECK(cfg.metrics_cfg.match_mode == "exact");

  // Derived accessors and the mock wiring.
  CHECK(cfg.style_variant() == MapStyleVariant::LandmarksOnly);
  CHECK(cfg.aggregation() == llm::Aggregation::ConsolidateViaLlm);
  CHECK(cfg.match_mode() == metrics::MatchMode::Exact);
  CHECK(cfg.mock.seed == 7);
  CHECK(cfg.mock.model_id == "mock-vlm-1");
  const auto axes = cfg.ablation_axes();
  CHECK(axes.resolutions.size() == 3);
  CHECK(axes.styles.size() == 4);
  CHECK(axes.ensemble_sizes.size() == 3);
  CHECK(cfg.map_style_for(MapStyleVariant::NoLabels).style_id == "no-labels");
}

TEST_CASE("the config hash is stable and tracks overrides") {
  const auto a = load_config(fixture_config());
  const auto b = load_config(fixture_config());
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.config_hash.size() == 64);

  Overrides o;
  o.seed = 8;
  const auto c = load_config(fixture_config(), o);
  CHECK(c.seed == 8);
  CHECK(c.mock.seed == 8);
  CHECK(c.config_hash != a.config_hash);
}

TEST_CASE("relative paths resolve against the config directory") {
  const auto cfg = load_config(fixture_config());
  const auto base = fixture_config().parent_path();
  CHECK(cfg.base_dir == base);
  CHECK(cfg.resolve("../corpus") == base / "../corpus");
  CHECK(cfg.resolve("/abs/path") == std::filesystem::path("/abs/path"));
}

TEST_CASE("the hashed form keeps path values exactly as written") {
  const auto cfg = load_config(fixture_config());
  const auto eff = effective_json(cfg);
  CHECK(eff.at("paths").at("cache_dir") == "OVERRIDE_ME/cache");
  CHECK(eff.at("paths").at("output_dir") == "OVERRIDE_ME/out");
  CHECK(eff.at("tiles").at("resolution") == 1024);
  CHECK(eff.at("budget").at("max_backend_calls") == 200000);
  // The hash input names the token variables but never their values.
  setenv("MAPCAP_MAP_TOKEN", "super-secret-value", 1);
  const auto dumped = effective_json(load_config(fixture_config())).dump();
  CHECK(dumped.find("MAPCAP_MAP_TOKEN") != std::string::npos);
  CHECK(dumped.find("super-secret-value") == std::string::npos);
  unsetenv("MAPCAP_MAP_TOKEN");
}

TEST_CASE("a minimal document fills documented defaults") {
  const auto cfg = config_from_json(valid_doc(), "/tmp/cfgbase");
  CHECK(cfg.seed == 0);
  CHECK(cfg.tiles.style == "landmarks-only");
  CHECK(cfg.tiles.resolution_px == 1024);
  CHECK(cfg.llm_cfg.backend == "mock");
  CHECK(cfg.llm_cfg.timeout_s == 120);
  CHECK(cfg.ensemble.n_prompts == 3);
  CHECK(cfg.ensemble.aggregation == "consolidate");
  CHECK(cfg.mock.default_hallucination_p == 0.2);
  CHECK(cfg.osm.tag_keys == osmref::kDefaultTagKeys);
  CHECK(cfg.ablate_cfg.resolutions == std::vector<int>{256, 512, 1024});
  CHECK(cfg.ablate_cfg.styles.size() == 4);
  CHECK(cfg.ablate_cfg.n_prompts == std::vector<int>{1, 3, 5});
  CHECK(cfg.budget_max_calls == -1);
  CHECK(cfg.runtime.parallelism == 1);
  CHECK(cfg.runtime.rate_limit_per_sec == 0.0);
  CHECK(cfg.metrics_cfg.match_mode == "exact");
  CHECK(cfg.base_dir == std::filesystem::path("/tmp/cfgbase"));
}

TEST_CASE("field violations report their dotted location") {
  auto doc = valid_doc();
  doc["tiles"]["style"] = "watercolor";
  expect_invalid(doc, "tiles.style");

  doc = valid_doc();
  doc["tiles"]["resolution"] = 333;
  expect_invalid(doc, "tiles.resolution");

  doc = valid_doc();
  doc["ensemble"] = {{"n_prompts", 2}};
  expect_invalid(doc, "ensemble.n_prompts");

  doc = valid_doc();
  doc["tiles"]["endpoint_template"] = "https://maps.test/{style}/{lon},{lat}";
  expect_invalid(doc, "tiles.endpoint_template");

  doc = valid_doc();
  doc["tiles"]["token_env"] = "1BAD NAME";
  expect_invalid(doc, "tiles.token_env");

  doc = valid_doc();
  doc["mock"]["hallucination"] = {{"default", 1.5}};
  expect_invalid(doc, "mock.hallucination.default");

  doc = valid_doc();
  doc["budget"] = {{"max_backend_calls", -5}};
  expect_invalid(doc, "budget.max_backend_calls");

  doc = valid_doc();
  doc["ablate"] = {{"resolutions", {256, 256}},
                   {"styles", {"all-labels"}},
                   {"n_prompts", {1}}};
  expect_invalid(doc, "ablate.resolutions");

  doc = valid_doc();
  doc["seed"] = -3;
  expect_invalid(doc, "seed");

  doc = valid_doc();
  doc["llm"] = {{"backend", "http"}, {"auth_env", "TOKEN"}};
  expect_invalid(doc, "llm.endpoint");

  doc = valid_doc();
  doc["paths"].erase("hedge_lexicon");
  expect_invalid(doc, "paths.hedge_lexicon");

  doc = valid_doc();
  doc["tiles"]["styles"].erase("no-labels");  // default grid still needs it
  expect_invalid(doc, "ablate.styles");

  doc = valid_doc();
  doc["ensemble"] = {{"aggregation", "vote"}};
  CHECK_THROWS_AS(config_from_json(doc, "."), Error);

  doc = valid_doc();
  doc["metrics"] = {{"match_mode", "levenshtein"}};
  CHECK_THROWS_AS(config_from_json(doc, "."), Error);
}

TEST_CASE("overrides land before validation") {
  Overrides o;
  o.style = "no-labels";
  o.resolution_px = 512;
  o.n_prompts = 1;
  o.budget = 10;
  o.parallelism = 4;
  o.zoom_offset = -2;
  const auto cfg = config_from_json(valid_doc(), ".", o);
  CHECK(cfg.style_variant() == MapStyleVariant::NoLabels);
  CHECK(cfg.tiles.resolution_px == 512);
  CHECK(cfg.ensemble.n_prompts == 1);
  CHECK(cfg.budget_max_calls == 10);
  CHECK(cfg.runtime.parallelism == 4);
  CHECK(cfg.tiles.zoom_offset == -2);

  Overrides bad;
  bad.resolution_px = 640;
  CHECK_THROWS_AS(config_from_json(valid_doc(), ".", bad), ValidationError);

  // Switching to http without an endpoint must fail loudly.
  Overrides backend;
  backend.backend = "http";
  CHECK_THROWS_AS(config_from_json(valid_doc(), ".", backend),
                  ValidationError);
}
