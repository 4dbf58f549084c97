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

#include "mapcap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mapcap/ablate.hpp"
#include "mapcap/assemble.hpp"
#include "mapcap/errors.hpp"
#include "mapcap/geo.hpp"
#include "mapcap/hashutil.hpp"
#include "mapcap/httputil.hpp"
#include "mapcap/ingest.hpp"
#include "mapcap/jsonio.hpp"
#include "mapcap/llm.hpp"
#include "mapcap/log.hpp"
#include "mapcap/metrics.hpp"
#include "mapcap/osmref.hpp"
#include "mapcap/retry.hpp"
#include "mapcap/style.hpp"
#include "mapcap/workpool.hpp"

namespace mapcap::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stand-in tile written by the mock backend path: a valid 1x1 transparent
// PNG. The mock model reads only the tile's filename, never its pixels.
constexpr unsigned char kPlaceholderPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d,
    0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01,
    0x08, 0x06, 0x00, 0x00, 0x00, 0x1f, 0x15, 0xc4, 0x89, 0x00, 0x00, 0x00,
    0x0b, 0x49, 0x44, 0x41, 0x54, 0x78, 0xda, 0x63, 0x60, 0x00, 0x02, 0x00,
    0x00, 0x05, 0x00, 0x01, 0xe9, 0xfa, 0xdc, 0xd8, 0x00, 0x00, 0x00, 0x00,
    0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

fs::path output_root(const config::RunConfig& cfg) {
  return cfg.resolve(cfg.paths.output_dir);
}

void write_json_file(const fs::path& path, const json& j) {
  jsonio::write_text_atomic(path, jsonio::canonical_dump(j) + "\n");
}

json read_json_file(const fs::path& path, const std::string& what) {
  return jsonio::parse_json(jsonio::read_text_file(path), what);
}

std::vector<ingest::SampleRecord> load_stage_corpus(
    const config::RunConfig& cfg) {
  const fs::path path = output_root(cfg) / "corpus.json";
  if (!fs::exists(path)) {
    throw MissingFileError(path.string(),
                           "corpus index not found; run the ingest stage first");
  }
  json j = read_json_file(path, "corpus.json");
  return j.at("samples").get<std::vector<ingest::SampleRecord>>();
}

std::unique_ptr<llm::LlmBackend> make_backend(const config::RunConfig& cfg) {
  if (cfg.llm_cfg.backend == "mock") {
    return std::make_unique<llm::MockBackend>(cfg.mock);
  }
  llm::HttpBackendConfig hc;
  hc.endpoint = cfg.llm_cfg.endpoint;
  hc.model_id = cfg.llm_cfg.model_id;
  hc.auth_env = cfg.llm_cfg.auth_env;
  hc.params = cfg.llm_cfg.params;
  hc.timeout_s = cfg.llm_cfg.timeout_s;
  return std::make_unique<llm::HttpBackend>(hc);
}

// Settings a caption file depends on. Captions carry this block so reruns
// regenerate exactly the files whose inputs changed.
json caption_fingerprint(const config::RunConfig& cfg) {
  return json{{"style", cfg.tiles.style},
              {"resolution_px", cfg.tiles.resolution_px},
              {"n_prompts", cfg.ensemble.n_prompts},
              {"aggregation", cfg.ensemble.aggregation},
              {"model_id", cfg.llm_cfg.model_id},
              {"seed", cfg.seed}};
}

// Downloads one static-map image. The access token comes from the named
// environment variable at request time and is appended only to the outgoing
// URL; the spec persisted in indexes keeps the token-free form.
std::string fetch_tile_http(const std::string& url,
                            const std::string& token_env,
                            const retry::RetryPolicy& policy, uint64_t seed) {
  std::string request_url = url;
  if (!token_env.empty()) {
    const char* token = std::getenv(token_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw BackendError(
          "map token environment variable " + token_env + " is not set",
          false);
    }
    request_url += request_url.find('?') == std::string::npos ? '?' : '&';
    request_url += "access_token=";
    request_url += token;
  }
  const httputil::SplitUrl split = httputil::split_url(request_url);
  std::string body;
  retry::run_with_retry(
      [&] {
        httplib::Client client(split.base);
        client.set_connection_timeout(30, 0);
        client.set_read_timeout(60, 0);
        auto res = client.Get(split.path);
        if (!res) {
          throw BackendError(
              "tile request transport failure: " + httplib::to_string(res.error()),
              true);
        }
        if (res->status != 200) {
          throw BackendError(
              "tile request failed with status " + std::to_string(res->status),
              httputil::retryable_status(res->status), res->status);
        }
        body = res->body;
      },
      policy, seed, "tile");
  return body;
}

void write_tile(const fs::path& path, const config::RunConfig& cfg,
                const geo::MapRequestSpec& spec, const std::string& sample_id) {
  if (cfg.llm_cfg.backend == "mock") {
    jsonio::write_text_atomic(
        path, std::string_view(reinterpret_cast<const char*>(kPlaceholderPng),
                               sizeof(kPlaceholderPng)));
    return;
  }
  const std::string body =
      fetch_tile_http(spec.url, cfg.tiles.token_env, cfg.runtime.retry,
                      cfg.seed ^ hashutil::fnv1a64(sample_id));
  jsonio::write_text_atomic(path, body);
}

struct TileEntry {
  std::string rel_path;  // relative to the output root
  geo::MapRequestSpec spec;
};

// tiles.json entries for the configured style/resolution, keyed by sample.
std::map<std::string, TileEntry> load_tile_index(const config::RunConfig& cfg) {
  const fs::path path = output_root(cfg) / "tiles.json";
  if (!fs::exists(path)) {
    throw MissingFileError(path.string(),
                           "tile index not found; run the tiles stage first");
  }
  const json j = read_json_file(path, "tiles.json");
  const std::string slug = style_slug(cfg.style_variant());
  std::map<std::string, TileEntry> index;
  for (const json& e : j.at("entries")) {
    if (e.at("style").get<std::string>() != slug ||
        e.at("resolution").get<int>() != cfg.tiles.resolution_px) {
      continue;
    }
    TileEntry entry;
    entry.rel_path = e.at("path").get<std::string>();
    entry.spec = e.at("spec").get<geo::MapRequestSpec>();
    index[e.at("sample_id").get<std::string>()] = std::move(entry);
  }
  return index;
}

std::vector<osmref::OsmElement> load_offline_elements(
    const config::RunConfig& cfg) {
  if (cfg.paths.osm_extract.empty()) {
    return {};
  }
  const fs::path extract = cfg.resolve(cfg.paths.osm_extract);
  if (!fs::exists(extract)) {
    throw MissingFileError(extract.string(),
                           "configured OSM extract not found");
  }
  return osmref::parse_osm_extract(jsonio::read_text_file(extract));
}

}  // namespace

int run_ingest(const config::RunConfig& cfg, const StageOptions& opt) {
  const fs::path corpus_dir = cfg.resolve(cfg.paths.corpus_dir);
  ingest::CorpusLoad load = ingest::load_corpus(corpus_dir);
  // Later stages run from any directory, so image paths are anchored to the
  // corpus directory here, once.
  for (ingest::SampleRecord& r : load.records) {
    const fs::path image = r.image_path;
    if (image.is_relative()) {
      r.image_path = (corpus_dir / image).lexically_normal().string();
    }
  }
  for (const auto& skip : load.skips) {
    log::event("ingest_skip", {{"file", skip.file}, {"reason", skip.reason}});
  }
  log::event("ingest_done", {{"samples", load.records.size()},
                             {"skips", load.skips.size()}});
  if (opt.dry_run) {
    std::printf("ingest: %zu samples, %zu skips (dry run)\n",
                load.records.size(), load.skips.size());
    return load.skips.empty() ? kExitOk : kExitPartial;
  }
  json skips = json::array();
  for (const auto& skip : load.skips) {
    skips.push_back({{"file", skip.file}, {"reason", skip.reason}});
  }
  const fs::path out = output_root(cfg);
  fs::create_directories(out);
  write_json_file(out / "corpus.json",
                  json{{"samples", load.records}, {"skips", skips}});
  std::printf("ingest: %zu samples, %zu skips\n", load.records.size(),
              load.skips.size());
  return load.skips.empty() ? kExitOk : kExitPartial;
}

int run_tiles(const config::RunConfig& cfg, const StageOptions& opt) {
  const auto corpus = load_stage_corpus(cfg);
  const fs::path out = output_root(cfg);
  const fs::path tiles_dir = out / "tiles";
  const MapStyle style = cfg.map_style_for(cfg.style_variant());
  if (!opt.dry_run) {
    fs::create_directories(tiles_dir);
  }
  json entries = json::array();
  std::size_t fetched = 0, reused = 0, failed = 0;
  for (const ingest::SampleRecord& sample : corpus) {
    geo::MapRequestSpec spec;
    try {
      spec = geo::build_map_request(sample.footprint, cfg.tiles.resolution_px,
                                    style, cfg.tiles.endpoint_template,
                                    cfg.tiles.zoom_offset);
    } catch (const Error& e) {
      ++failed;
      log::event("tile_failed",
                 {{"sample_id", sample.id}, {"error", e.what()}});
      continue;
    }
    const std::string name = geo::map_tile_filename(
        sample.id, style.slug(), cfg.tiles.resolution_px);
    const fs::path tile_path = tiles_dir / name;
    if (opt.dry_run) {
      fs::exists(tile_path) ? ++reused : ++fetched;
      continue;
    }
    if (fs::exists(tile_path)) {
      ++reused;
    } else {
      try {
        write_tile(tile_path, cfg, spec, sample.id);
        ++fetched;
      } catch (const Error& e) {
        ++failed;
        log::event("tile_failed",
                   {{"sample_id", sample.id}, {"error", e.what()}});
        continue;
      }
    }
    entries.push_back({{"sample_id", sample.id},
                       {"style", style.slug()},
                       {"resolution", cfg.tiles.resolution_px},
                       {"path", "tiles/" + name},
                       {"spec", spec}});
  }
  if (opt.dry_run) {
    std::printf("tiles: %zu to fetch, %zu present, %zu invalid (dry run)\n",
                fetched, reused, failed);
    return failed == 0 ? kExitOk : kExitPartial;
  }
  write_json_file(out / "tiles.json", json{{"entries", entries}});
  std::printf("tiles: %zu fetched, %zu reused, %zu failed\n", fetched, reused,
              failed);
  return failed == 0 ? kExitOk : kExitPartial;
}

int run_refs(const config::RunConfig& cfg, const StageOptions& opt) {
  const auto corpus = load_stage_corpus(cfg);
  const fs::path refs_dir = output_root(cfg) / "refs";
  const MapStyle style = cfg.map_style_for(cfg.style_variant());
  const bool online = !cfg.osm.overpass_endpoint.empty();
  std::vector<osmref::OsmElement> elements;
  if (!online) {
    elements = load_offline_elements(cfg);
    if (elements.empty() && cfg.paths.osm_extract.empty()) {
      log::event("refs_metadata_only", {});
    }
  }
  if (opt.dry_run) {
    std::printf("refs: %zu lists planned, %s source (dry run)\n", corpus.size(),
                online ? "online" : "offline");
    return kExitOk;
  }
  fs::create_directories(refs_dir);
  for (const ingest::SampleRecord& sample : corpus) {
    std::vector<osmref::OsmElement> fetched;
    const std::vector<osmref::OsmElement>* source = &elements;
    if (online) {
      fetched = osmref::fetch_overpass(
          cfg.osm.overpass_endpoint, sample.footprint, cfg.runtime.retry,
          cfg.seed ^ hashutil::fnv1a64(sample.id));
      source = &fetched;
    }
    const osmref::ReferenceList refs = osmref::build_reference_list(
        *source, sample.footprint, style, sample, cfg.osm.tag_keys);
    json j = refs;
    j["sample_id"] = sample.id;
    j["style"] = style.slug();
    write_json_file(refs_dir / (sample.id + ".refs.json"), j);
  }
  std::printf("refs: %zu reference lists written\n", corpus.size());
  return kExitOk;
}

int run_caption(const config::RunConfig& cfg, const StageOptions& opt) {
  const auto corpus = load_stage_corpus(cfg);
  const fs::path out = output_root(cfg);
  const auto tile_index = load_tile_index(cfg);
  const fs::path captions_dir = out / "captions";
  const json fingerprint = caption_fingerprint(cfg);

  struct Task {
    const ingest::SampleRecord* sample;
    fs::path tile_path;
    fs::path out_file;
  };
  std::vector<Task> tasks;
  std::size_t reused = 0, missing_tiles = 0;
  for (const ingest::SampleRecord& sample : corpus) {
    const auto it = tile_index.find(sample.id);
    if (it == tile_index.end()) {
      ++missing_tiles;
      log::event("caption_skip_no_tile", {{"sample_id", sample.id}});
      continue;
    }
    const fs::path out_file = captions_dir / (sample.id + ".caption.json");
    if (fs::exists(out_file)) {
      try {
        const json existing = read_json_file(out_file, "caption file");
        if (existing.value("fingerprint", json()) == fingerprint) {
          ++reused;
          continue;
        }
      } catch (const Error&) {
        // Unreadable caption files are regenerated.
      }
    }
    tasks.push_back({&sample, out / it->second.rel_path, out_file});
  }
  if (opt.dry_run) {
    std::printf(
        "caption: %zu to generate, %zu current, %zu without tiles (dry run)\n",
        tasks.size(), reused, missing_tiles);
    return missing_tiles == 0 ? kExitOk : kExitPartial;
  }

  fs::create_directories(captions_dir);
  const fs::path cache_dir = cfg.resolve(cfg.paths.cache_dir);
  fs::create_directories(cache_dir);
  const auto backend = make_backend(cfg);
  const llm::Cache cache(cache_dir);
  std::unique_ptr<llm::RequestBudget> budget;
  if (cfg.budget_max_calls >= 0) {
    budget = std::make_unique<llm::RequestBudget>(cfg.budget_max_calls);
  }
  std::unique_ptr<workpool::RateLimiter> limiter;
  if (cfg.runtime.rate_limit_per_sec > 0) {
    limiter =
        std::make_unique<workpool::RateLimiter>(cfg.runtime.rate_limit_per_sec);
  }
  llm::GenerateContext ctx;
  ctx.backend = backend.get();
  ctx.cache = &cache;
  ctx.budget = budget.get();
  ctx.limiter = limiter.get();
  ctx.retry = cfg.runtime.retry;
  ctx.seed = cfg.seed;
  const llm::EnsembleConfig ensemble_cfg{cfg.ensemble.n_prompts,
                                         cfg.aggregation(), cfg.seed};

  std::mutex mu;
  std::vector<std::string> failures;
  std::vector<std::function<void()>> fns;
  fns.reserve(tasks.size());
  for (const Task& task : tasks) {
    fns.push_back([&, task] {
      try {
        const llm::CaptionBundle bundle =
            llm::ensemble(*task.sample,
                          {task.sample->image_path, task.tile_path.string()},
                          ensemble_cfg, ctx);
        json j = bundle;
        j["fingerprint"] = fingerprint;
        write_json_file(task.out_file, j);
      } catch (const BudgetError&) {
        throw;
      } catch (const Error& e) {
        const std::lock_guard<std::mutex> lock(mu);
        failures.push_back(task.sample->id);
        log::event("caption_failed",
                   {{"sample_id", task.sample->id}, {"error", e.what()}});
      }
    });
  }
  bool budget_exhausted = false;
  std::size_t done = 0;
  try {
    done = workpool::run_all(fns, cfg.runtime.parallelism);
  } catch (const BudgetError& e) {
    budget_exhausted = true;
    log::event("caption_budget_exhausted", {{"error", e.what()}});
  }
  const std::size_t generated = done >= failures.size() ? done - failures.size() : 0;
  std::printf("caption: %zu generated, %zu current, %zu failed%s\n", generated,
              reused, tasks.size() - generated,
              budget_exhausted ? " (budget exhausted)" : "");
  const bool clean =
      !budget_exhausted && failures.empty() && missing_tiles == 0 &&
      done == tasks.size();
  return clean ? kExitOk : kExitPartial;
}

int run_audit(const config::RunConfig& cfg, const StageOptions& opt) {
  const fs::path out = output_root(cfg);
  const fs::path captions_dir = out / "captions";
  const fs::path refs_dir = out / "refs";
  const fs::path audits_dir = out / "audits";
  if (!fs::exists(captions_dir)) {
    throw MissingFileError(
        captions_dir.string(),
        "captions directory not found; run the caption stage first");
  }
  const std::string suffix = ".caption.json";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(captions_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  const metrics::HedgeLexicon lexicon =
      metrics::HedgeLexicon::load(cfg.resolve(cfg.paths.hedge_lexicon));
  const metrics::MatchMode mode = cfg.match_mode();
  if (!opt.dry_run) {
    fs::create_directories(audits_dir);
  }
  std::size_t audited = 0, skipped = 0;
  double fdr_sum = 0.0;
  for (const fs::path& file : files) {
    const std::string name = file.filename().string();
    const std::string id = name.substr(0, name.size() - suffix.size());
    const fs::path refs_path = refs_dir / (id + ".refs.json");
    if (!fs::exists(refs_path)) {
      ++skipped;
      log::event("audit_skip_no_refs", {{"sample_id", id}});
      continue;
    }
    if (opt.dry_run) {
      ++audited;
      continue;
    }
    const llm::CaptionBundle bundle =
        read_json_file(file, "caption file").get<llm::CaptionBundle>();
    const osmref::ReferenceList refs =
        read_json_file(refs_path, "reference file").get<osmref::ReferenceList>();
    assemble::AuditRecord record;
    record.sample_id = id;
    record.fdr = metrics::compute_fdr(
        metrics::extract_proper_nouns(bundle.final_caption), refs, mode);
    record.uncertainty = metrics::compute_uncertainty(bundle.final_caption,
                                                      lexicon);
    fdr_sum += record.fdr.fdr;
    write_json_file(audits_dir / (id + ".audit.json"), json(record));
    ++audited;
  }
  if (opt.dry_run) {
    std::printf("audit: %zu planned, %zu without references (dry run)\n",
                audited, skipped);
    return skipped == 0 ? kExitOk : kExitPartial;
  }
  if (audited == 0) {
    log::event("audit_empty", {});
    std::fprintf(stderr, "audit: no caption/reference pairs to audit\n");
    return kExitFatal;
  }
  std::printf("audit: %zu captions, mean FDR = %.2f\n", audited,
              fdr_sum / static_cast<double>(audited));
  return skipped == 0 ? kExitOk : kExitPartial;
}

int run_assemble(const config::RunConfig& cfg, const StageOptions& opt) {
  const auto corpus = load_stage_corpus(cfg);
  const fs::path out = output_root(cfg);
  const auto tile_index = load_tile_index(cfg);
  const std::string manifest_path = (out / "manifest.jsonl").string();
  assemble::Manifest manifest;
  if (fs::exists(manifest_path)) {
    manifest = assemble::read_manifest(manifest_path);
    if (manifest.header.config_hash != cfg.config_hash) {
      throw MismatchError(
          "existing manifest was produced by a different configuration; "
          "move it aside or rerun with the original settings");
    }
  } else {
    manifest.header.config_hash = cfg.config_hash;
  }
  const std::vector<std::string> pending =
      assemble::resume_plan(manifest, corpus);
  if (opt.dry_run) {
    std::printf("assemble: %zu rows present, %zu pending (dry run)\n",
                manifest.rows.size(), pending.size());
    return kExitOk;
  }
  std::map<std::string, const ingest::SampleRecord*> by_id;
  for (const ingest::SampleRecord& sample : corpus) {
    by_id[sample.id] = &sample;
  }
  assemble::Provenance provenance;
  provenance.config_hash = cfg.config_hash;
  provenance.created_at = assemble::created_at_now();
  const json fingerprint = caption_fingerprint(cfg);
  std::size_t added = 0, skipped = 0;
  for (const std::string& id : pending) {
    try {
      const ingest::SampleRecord& sample = *by_id.at(id);
      const auto tile_it = tile_index.find(id);
      if (tile_it == tile_index.end()) {
        throw MissingFileError(id, "no tile index entry for sample " + id);
      }
      const fs::path caption_path = out / "captions" / (id + ".caption.json");
      if (!fs::exists(caption_path)) {
        throw MissingFileError(caption_path.string(),
                               "caption file missing for sample " + id);
      }
      const json caption_doc = read_json_file(caption_path, "caption file");
      if (caption_doc.value("fingerprint", json()) != fingerprint) {
        throw MismatchError("caption for " + id +
                            " was generated under different settings; rerun "
                            "the caption stage");
      }
      const fs::path refs_path = out / "refs" / (id + ".refs.json");
      if (!fs::exists(refs_path)) {
        throw MissingFileError(refs_path.string(),
                               "reference file missing for sample " + id);
      }
      const fs::path audit_path = out / "audits" / (id + ".audit.json");
      if (!fs::exists(audit_path)) {
        throw MissingFileError(audit_path.string(),
                               "audit file missing for sample " + id);
      }
      assemble::DatasetTuple tuple = assemble::assemble_tuple(
          sample, tile_it->second.spec, (out / tile_it->second.rel_path).string(),
          caption_doc.get<llm::CaptionBundle>(),
          read_json_file(refs_path, "reference file")
              .get<osmref::ReferenceList>(),
          read_json_file(audit_path, "audit file").get<assemble::AuditRecord>(),
          provenance);
      // Rows travel with the manifest, so the tile path is stored relative
      // to it; existence was just checked against the absolute form.
      tuple.map_path = tile_it->second.rel_path;
      manifest.rows.push_back(std::move(tuple));
      ++added;
    } catch (const Error& e) {
      ++skipped;
      log::event("assemble_skip", {{"sample_id", id}, {"error", e.what()}});
    }
  }
  assemble::write_manifest(manifest, manifest_path);
  std::printf("assemble: %zu rows (%zu added, %zu skipped)\n",
              manifest.rows.size(), added, skipped);
  return skipped == 0 ? kExitOk : kExitPartial;
}

int run_ablate(const config::RunConfig& cfg, const StageOptions& opt) {
  const auto corpus = load_stage_corpus(cfg);
  const ablate::AblationAxes axes = cfg.ablation_axes();
  const std::size_t n_cells =
      axes.resolutions.size() * axes.styles.size() * axes.ensemble_sizes.size();
  if (opt.dry_run) {
    std::printf("ablate: %zu cells x %zu samples (dry run)\n", n_cells,
                corpus.size());
    return kExitOk;
  }
  const fs::path out = output_root(cfg);
  const fs::path ablation_dir = out / "ablation";
  const fs::path tiles_dir = out / "tiles";
  fs::create_directories(ablation_dir / "audits");
  fs::create_directories(tiles_dir);
  const metrics::HedgeLexicon lexicon =
      metrics::HedgeLexicon::load(cfg.resolve(cfg.paths.hedge_lexicon));
  const metrics::MatchMode mode = cfg.match_mode();
  const bool online = !cfg.osm.overpass_endpoint.empty();
  const std::vector<osmref::OsmElement> offline_elements =
      online ? std::vector<osmref::OsmElement>{} : load_offline_elements(cfg);
  std::map<std::string, std::vector<osmref::OsmElement>> online_cache;

  std::map<std::string, const ingest::SampleRecord*> by_id;
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const ingest::SampleRecord& sample : corpus) {
    by_id[sample.id] = &sample;
    ids.push_back(sample.id);
  }

  const fs::path cache_dir = cfg.resolve(cfg.paths.cache_dir);
  fs::create_directories(cache_dir);
  const auto backend = make_backend(cfg);
  const llm::Cache cache(cache_dir);
  std::unique_ptr<llm::RequestBudget> budget;
  if (cfg.budget_max_calls >= 0) {
    budget = std::make_unique<llm::RequestBudget>(cfg.budget_max_calls);
  }
  std::unique_ptr<workpool::RateLimiter> limiter;
  if (cfg.runtime.rate_limit_per_sec > 0) {
    limiter =
        std::make_unique<workpool::RateLimiter>(cfg.runtime.rate_limit_per_sec);
  }
  llm::GenerateContext ctx;
  ctx.backend = backend.get();
  ctx.cache = &cache;
  ctx.budget = budget.get();
  ctx.limiter = limiter.get();
  ctx.retry = cfg.runtime.retry;
  ctx.seed = cfg.seed;

  const auto evaluator = [&](const std::string& id, int resolution_px,
                             MapStyleVariant variant,
                             int n_prompts) -> ablate::SampleMetrics {
    const ingest::SampleRecord& sample = *by_id.at(id);
    const MapStyle style = cfg.map_style_for(variant);
    const fs::path tile_path =
        tiles_dir / geo::map_tile_filename(id, style.slug(), resolution_px);
    if (!fs::exists(tile_path)) {
      const geo::MapRequestSpec spec = geo::build_map_request(
          sample.footprint, resolution_px, style, cfg.tiles.endpoint_template,
          cfg.tiles.zoom_offset);
      write_tile(tile_path, cfg, spec, id);
    }
    const std::vector<osmref::OsmElement>* elements = &offline_elements;
    if (online) {
      const auto [it, inserted] = online_cache.try_emplace(id);
      if (inserted) {
        it->second = osmref::fetch_overpass(
            cfg.osm.overpass_endpoint, sample.footprint, cfg.runtime.retry,
            cfg.seed ^ hashutil::fnv1a64(id));
      }
      elements = &it->second;
    }
    const osmref::ReferenceList refs = osmref::build_reference_list(
        *elements, sample.footprint, style, sample, cfg.osm.tag_keys);
    const llm::EnsembleConfig ensemble_cfg{n_prompts, cfg.aggregation(),
                                           cfg.seed};
    const llm::CaptionBundle bundle = llm::ensemble(
        sample, {sample.image_path, tile_path.string()}, ensemble_cfg, ctx);
    assemble::AuditRecord record;
    record.sample_id = id;
    record.fdr = metrics::compute_fdr(
        metrics::extract_proper_nouns(bundle.final_caption), refs, mode);
    record.uncertainty =
        metrics::compute_uncertainty(bundle.final_caption, lexicon);
    const std::string cell_tag = std::to_string(resolution_px) + "_" +
                                 style.slug() + "_" +
                                 std::to_string(n_prompts);
    const fs::path cell_dir = ablation_dir / "audits" / cell_tag;
    fs::create_directories(cell_dir);
    write_json_file(cell_dir / (id + ".audit.json"), json(record));
    return {record.fdr.fdr, record.uncertainty.uncertain_pct};
  };

  const fs::path cells_path = ablation_dir / "cells.json";
  ablate::AblationResult snapshot;
  const auto on_cell = [&](const ablate::AblationCell& cell) {
    snapshot.cells.push_back(cell);
    write_json_file(cells_path, json(snapshot));
  };
  const ablate::AblationResult result = ablate::run_grid(
      ids, axes, evaluator, cfg.seed, on_cell,
      static_cast<std::size_t>(cfg.ablate_cfg.bootstrap_resamples));
  write_json_file(cells_path, json(result));
  std::printf("ablate: %zu/%zu cells%s\n", result.cells.size(), n_cells,
              result.aborted ? " (budget exhausted)" : "");
  return result.aborted ? kExitPartial : kExitOk;
}

int run_report(const config::RunConfig& cfg, const StageOptions& opt) {
  const fs::path out = output_root(cfg);
  const fs::path cells_path = out / "ablation" / "cells.json";
  if (!fs::exists(cells_path)) {
    throw MissingFileError(
        cells_path.string(),
        "ablation results not found; run the ablate stage first");
  }
  const ablate::AblationResult result =
      read_json_file(cells_path, "cells.json").get<ablate::AblationResult>();
  if (result.cells.empty()) {
    std::fprintf(stderr, "report: no completed ablation cells\n");
    return kExitFatal;
  }
  if (opt.dry_run) {
    std::printf("report: %zu cells (dry run)\n", result.cells.size());
    return kExitOk;
  }
  jsonio::write_text_atomic(out / "ablation.csv",
                            ablate::cells_to_csv(result.cells));
  write_json_file(out / "ablation_plot.json",
                  ablate::cells_to_plot_data(result.cells, cfg.ablation_axes()));
  std::printf("report: %zu cells -> ablation.csv, ablation_plot.json\n",
              result.cells.size());
  return kExitOk;
}

}  // namespace mapcap::pipeline
