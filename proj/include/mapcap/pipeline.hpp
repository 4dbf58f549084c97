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

#ifndef MAPCAP_PIPELINE_HPP_
#define MAPCAP_PIPELINE_HPP_

// Batch entry points behind the command-line stages. Every stage reads its
// inputs from the previous stage's artifacts under the configured output
// directory and is safe to re-run: finished work is detected and skipped,
// so an interrupted run resumes where it stopped.
//
// Artifact layout under paths.output_dir:
//   corpus.json                      ingested sample records
//   tiles/<id>_<style>_<res>.png     rendered map tiles
//   tiles.json                       tile index with request specs
//   refs/<id>.refs.json              reference name lists
//   captions/<id>.caption.json       caption bundles with run fingerprints
//   audits/<id>.audit.json           per-sample metric reports
//   manifest.jsonl                   assembled dataset rows
//   ablation/cells.json              ablation grid results
//   ablation/audits/<cell>/<id>.audit.json
//   ablation.csv, ablation_plot.json reporting artifacts

#include "mapcap/config.hpp"

namespace mapcap::pipeline {

inline constexpr int kExitOk = 0;       // stage finished completely
inline constexpr int kExitPartial = 1;  // finished with skips or budget stop
inline constexpr int kExitFatal = 2;    // nothing usable produced

struct StageOptions {
  // Full validation and planning, zero writes and zero network calls.
  bool dry_run = false;
};

int run_ingest(const config::RunConfig& cfg, const StageOptions& opt);
int run_tiles(const config::RunConfig& cfg, const StageOptions& opt);
int run_refs(const config::RunConfig& cfg, const StageOptions& opt);
int run_caption(const config::RunConfig& cfg, const StageOptions& opt);
int run_audit(const config::RunConfig& cfg, const StageOptions& opt);
int run_assemble(const config::RunConfig& cfg, const StageOptions& opt);
int run_ablate(const config::RunConfig& cfg, const StageOptions& opt);
int run_report(const config::RunConfig& cfg, const StageOptions& opt);

}  // namespace mapcap::pipeline

#endif  // MAPCAP_PIPELINE_HPP_
