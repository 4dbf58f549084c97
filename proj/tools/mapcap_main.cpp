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

#include <csignal>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mapcap/config.hpp"
#include "mapcap/errors.hpp"
#include "mapcap/log.hpp"
#include "mapcap/pipeline.hpp"
#include "mapcap/workpool.hpp"

namespace {

void handle_interrupt(int) { mapcap::workpool::request_stop(); }

}  // namespace

int main(int argc, char** argv) {
  using mapcap::pipeline::StageOptions;
  using StageFn = int (*)(const mapcap::config::RunConfig&,
                          const StageOptions&);

  CLI::App app{
      "mapcap: builds map-grounded caption datasets for overhead imagery"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path;
  app.add_option("-c,--config", config_path, "run configuration file")
      ->required();
  mapcap::config::Overrides overrides;
  app.add_option("--seed", overrides.seed, "override the run seed");
  app.add_option("--backend", overrides.backend, "model backend")
      ->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--budget", overrides.budget,
                 "maximum logical model calls, -1 for unlimited");
  app.add_option("--parallelism", overrides.parallelism, "worker threads");
  app.add_option("--style", overrides.style, "map style slug");
  app.add_option("--resolution", overrides.resolution_px,
                 "map tile edge length in pixels");
  app.add_option("--prompts", overrides.n_prompts, "prompts per sample");
  app.add_option("--zoom-offset", overrides.zoom_offset,
                 "shift applied to the fitted map zoom");
  bool dry_run = false;
  app.add_flag("-n,--dry-run", dry_run, "validate and plan, write nothing");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress events on stderr");

  struct Stage {
    const char* name;
    const char* help;
    StageFn fn;
  };
  const Stage stages[] = {
      {"ingest", "scan the corpus metadata into corpus.json",
       mapcap::pipeline::run_ingest},
      {"tiles", "request one map tile per sample", mapcap::pipeline::run_tiles},
      {"refs", "build per-sample reference name lists",
       mapcap::pipeline::run_refs},
      {"caption", "generate captions through the configured model",
       mapcap::pipeline::run_caption},
      {"audit", "score captions against their reference lists",
       mapcap::pipeline::run_audit},
      {"assemble", "combine all artifacts into manifest.jsonl",
       mapcap::pipeline::run_assemble},
      {"ablate", "sweep resolution, style and ensemble size",
       mapcap::pipeline::run_ablate},
      {"report", "export ablation tables and plot data",
       mapcap::pipeline::run_report},
  };
  for (const Stage& stage : stages) {
    app.add_subcommand(stage.name, stage.help);
  }

  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, handle_interrupt);
  mapcap::log::set_enabled(!quiet);

  try {
    const mapcap::config::RunConfig cfg =
        mapcap::config::load_config(config_path, overrides);
    const StageOptions options{dry_run};
    for (const Stage& stage : stages) {
      if (app.got_subcommand(stage.name)) {
        return stage.fn(cfg, options);
      }
    }
  } catch (const mapcap::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return mapcap::pipeline::kExitFatal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return mapcap::pipeline::kExitFatal;
  }
  return mapcap::pipeline::kExitFatal;
}
