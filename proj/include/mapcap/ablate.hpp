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

#ifndef MAPCAP_ABLATE_HPP_
#define MAPCAP_ABLATE_HPP_

// Ablation grid: sweep map resolution, map style and ensemble size, then
// aggregate caption metrics per cell with bootstrap confidence intervals.
//
// The grid runner walks the cross product and aggregates whatever the
// injected per-sample evaluator returns. The pipeline binds the evaluator
// to the real caption + audit path; tests bind synthetic ones.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mapcap/style.hpp"

namespace mapcap::ablate {

// Value sets to sweep, in sweep order. Validated non-empty upstream.
struct AblationAxes {
  std::vector<int> resolutions;
  std::vector<MapStyleVariant> styles;
  std::vector<int> ensemble_sizes;
};

// Aggregated metrics for one (resolution, style, ensemble size) cell.
struct AblationCell {
  int resolution_px = 0;
  MapStyleVariant style = MapStyleVariant::AllLabels;
  int n_prompts = 1;
  double mean_fdr = 0.0;
  double mean_uncertain_pct = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_samples = 0;
};

void to_json(nlohmann::json& j, const AblationCell& c);
void from_json(const nlohmann::json& j, AblationCell& c);

struct AblationResult {
  std::vector<AblationCell> cells;
  bool aborted = false;  // budget ran out; cells holds the completed prefix
};

void to_json(nlohmann::json& j, const AblationResult& r);
void from_json(const nlohmann::json& j, AblationResult& r);

// Per-sample metrics produced by the evaluator.
struct SampleMetrics {
  double fdr = 0.0;
  double uncertain_pct = 0.0;
};

// Evaluates one sample under one cell configuration.
using CellEvaluator = std::function<SampleMetrics(
    const std::string& sample_id, int resolution_px, MapStyleVariant style,
    int n_prompts)>;

// Called after each completed cell (persistence hook). May be empty.
using CellObserver = std::function<void(const AblationCell&)>;

// Percentile bootstrap 95% interval of the mean: seeded resamples, lower
// index floor(0.025 * (B - 1)), upper index ceil(0.975 * (B - 1)).
// Degenerates to (mean, mean) for constant input.
std::pair<double, double> bootstrap_ci95(const std::vector<double>& values,
                                         uint64_t seed,
                                         std::size_t resamples = 1000);

// Deterministic per-cell bootstrap seed derived from the run seed.
uint64_t cell_seed(uint64_t run_seed, int resolution_px, MapStyleVariant style,
                   int n_prompts);

// Walks resolutions x styles x ensemble sizes in declaration order and
// aggregates the evaluator's output per cell. A BudgetError from the
// evaluator stops the sweep; completed cells are kept and `aborted` is set.
// Any other exception propagates.
AblationResult run_grid(const std::vector<std::string>& sample_ids,
                        const AblationAxes& axes, const CellEvaluator& eval,
                        uint64_t run_seed, const CellObserver& on_cell = {},
                        std::size_t resamples = 1000);

// Fixed column order (resolution, style, n_prompts, mean_fdr, ci_lo, ci_hi,
// mean_uncertain_pct, n); rows sorted lexicographically as strings.
std::string cells_to_csv(const std::vector<AblationCell>& cells);

// Grouped series for the three sweep plots: metrics against resolution,
// style and ensemble size, one series per companion axis value.
nlohmann::json cells_to_plot_data(const std::vector<AblationCell>& cells,
                                  const AblationAxes& axes);

}  // namespace mapcap::ablate

#endif  // MAPCAP_ABLATE_HPP_
