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

#include "mapcap/ablate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "mapcap/detrng.hpp"
#include "mapcap/errors.hpp"
#include "mapcap/hashutil.hpp"
#include "mapcap/log.hpp"

namespace mapcap::ablate {

using nlohmann::json;

void to_json(json& j, const AblationCell& c) {
  j = json{{"resolution_px", c.resolution_px},
           {"style", style_slug(c.style)},
           {"n_prompts", c.n_prompts},
           {"mean_fdr", c.mean_fdr},
           {"mean_uncertain_pct", c.mean_uncertain_pct},
           {"ci_lo", c.ci_lo},
           {"ci_hi", c.ci_hi},
           {"n_samples", c.n_samples}};
}

void from_json(const json& j, AblationCell& c) {
  j.at("resolution_px").get_to(c.resolution_px);
  const auto slug = j.at("style").get<std::string>();
  const auto style = style_from_slug(slug);
  if (!style) throw SchemaError("unknown style slug '" + slug + "'");
  c.style = *style;
  j.at("n_prompts").get_to(c.n_prompts);
  j.at("mean_fdr").get_to(c.mean_fdr);
  j.at("mean_uncertain_pct").get_to(c.mean_uncertain_pct);
  j.at("ci_lo").get_to(c.ci_lo);
  j.at("ci_hi").get_to(c.ci_hi);
  j.at("n_samples").get_to(c.n_samples);
}

void to_json(json& j, const AblationResult& r) {
  j = json{{"aborted", r.aborted}, {"cells", r.cells}};
}

void from_json(const json& j, AblationResult& r) {
  j.at("aborted").get_to(r.aborted);
  r.cells = j.at("cells").get<std::vector<AblationCell>>();
}

std::pair<double, double> bootstrap_ci95(const std::vector<double>& values,
                                         uint64_t seed,
                                         std::size_t resamples) {
  if (values.empty()) return {0.0, 0.0};
  const std::size_t n = values.size();
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  if (resamples == 0) return {mean, mean};

  DetRng rng(seed);
  std::vector<double> means;
  means.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[rng.index(n)];
    means.push_back(sum / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  const double last = static_cast<double>(resamples - 1);
  const auto lo_idx = static_cast<std::size_t>(std::floor(0.025 * last));
  const auto hi_idx = static_cast<std::size_t>(std::ceil(0.975 * last));
  return {means[lo_idx], means[hi_idx]};
}

uint64_t cell_seed(uint64_t run_seed, int resolution_px, MapStyleVariant style,
                   int n_prompts) {
  uint64_t s = hashutil::fnv1a64("bootstrap");
  s = hashutil::fnv1a64_mix(s, run_seed);
  s = hashutil::fnv1a64_mix(s, static_cast<uint64_t>(resolution_px));
  s = hashutil::fnv1a64(style_slug(style), s);
  s = hashutil::fnv1a64_mix(s, static_cast<uint64_t>(n_prompts));
  return s;
}

AblationResult run_grid(const std::vector<std::string>& sample_ids,
                        const AblationAxes& axes, const CellEvaluator& eval,
                        uint64_t run_seed, const CellObserver& on_cell,
                        std::size_t resamples) {
  AblationResult result;
  for (int res : axes.resolutions) {
    for (MapStyleVariant style : axes.styles) {
      for (int n : axes.ensemble_sizes) {
        std::vector<double> fdrs, uncertainties;
        fdrs.reserve(sample_ids.size());
        uncertainties.reserve(sample_ids.size());
        try {
          for (const std::string& id : sample_ids) {
            const SampleMetrics m = eval(id, res, style, n);
            fdrs.push_back(m.fdr);
            uncertainties.push_back(m.uncertain_pct);
          }
        } catch (const BudgetError& e) {
          log::event("ablation_aborted",
                     {{"resolution", res},
                      {"style", style_slug(style)},
                      {"n_prompts", n},
                      {"reason", e.what()}});
          result.aborted = true;
          return result;
        }

        AblationCell cell;
        cell.resolution_px = res;
        cell.style = style;
        cell.n_prompts = n;
        cell.n_samples = fdrs.size();
        if (!fdrs.empty()) {
          cell.mean_fdr =
              std::accumulate(fdrs.begin(), fdrs.end(), 0.0) /
              static_cast<double>(fdrs.size());
          cell.mean_uncertain_pct =
              std::accumulate(uncertainties.begin(), uncertainties.end(), 0.0) /
              static_cast<double>(uncertainties.size());
        }
        const auto ci =
            bootstrap_ci95(fdrs, cell_seed(run_seed, res, style, n), resamples);
        cell.ci_lo = ci.first;
        cell.ci_hi = ci.second;
        result.cells.push_back(cell);
        if (on_cell) on_cell(cell);
        log::event("ablation_cell",
                   {{"resolution", res},
                    {"style", style_slug(style)},
                    {"n_prompts", n},
                    {"mean_fdr", cell.mean_fdr}});
      }
    }
  }
  return result;
}

std::string cells_to_csv(const std::vector<AblationCell>& cells) {
  std::vector<std::string> rows;
  rows.reserve(cells.size());
  for (const AblationCell& c : cells) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%s,%d,%.6f,%.6f,%.6f,%.6f,%zu",
                  c.resolution_px, style_slug(c.style).c_str(), c.n_prompts,
                  c.mean_fdr, c.ci_lo, c.ci_hi, c.mean_uncertain_pct,
                  c.n_samples);
    rows.emplace_back(buf);
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  out << "resolution,style,n_prompts,mean_fdr,ci_lo,ci_hi,mean_uncertain_pct,n\n";
  for (const std::string& r : rows) out << r << '\n';
  return out.str();
}

namespace {

const AblationCell* find_cell(const std::vector<AblationCell>& cells, int res,
                              MapStyleVariant style, int n) {
  for (const AblationCell& c : cells) {
    if (c.resolution_px == res && c.style == style && c.n_prompts == n) {
      return &c;
    }
  }
  return nullptr;
}

json point_json(int x_resolution, const std::string& x_style, int x_n,
                const AblationCell& c, int axis) {
  json p{{"mean_fdr", c.mean_fdr},
         {"ci_lo", c.ci_lo},
         {"ci_hi", c.ci_hi},
         {"mean_uncertain_pct", c.mean_uncertain_pct}};
  if (axis == 0) p["x"] = x_resolution;
  if (axis == 1) p["x"] = x_style;
  if (axis == 2) p["x"] = x_n;
  return p;
}

// The dataset's chosen operating point anchors the off-axis values.
int pick_default(const std::vector<int>& options, int preferred) {
  for (int v : options) {
    if (v == preferred) return v;
  }
  return options.empty() ? preferred : options.front();
}

}  // namespace

json cells_to_plot_data(const std::vector<AblationCell>& cells,
                        const AblationAxes& axes) {
  const int default_n = pick_default(axes.ensemble_sizes, 3);
  const int default_res = pick_default(axes.resolutions, 1024);

  json by_resolution = json::array();
  for (MapStyleVariant style : axes.styles) {
    json series{{"style", style_slug(style)},
                {"n_prompts", default_n},
                {"points", json::array()}};
    for (int res : axes.resolutions) {
      if (const AblationCell* c = find_cell(cells, res, style, default_n)) {
        series["points"].push_back(point_json(res, "", 0, *c, 0));
      }
    }
    by_resolution.push_back(std::move(series));
  }

  json by_style = json::array();
  for (int res : axes.resolutions) {
    json series{{"resolution_px", res},
                {"n_prompts", default_n},
                {"points", json::array()}};
    for (MapStyleVariant style : axes.styles) {
      if (const AblationCell* c = find_cell(cells, res, style, default_n)) {
        series["points"].push_back(point_json(0, style_slug(style), 0, *c, 1));
      }
    }
    by_style.push_back(std::move(series));
  }

  json by_ensemble = json::array();
  for (MapStyleVariant style : axes.styles) {
    json series{{"style", style_slug(style)},
                {"resolution_px", default_res},
                {"points", json::array()}};
    for (int n : axes.ensemble_sizes) {
      if (const AblationCell* c = find_cell(cells, default_res, style, n)) {
        series["points"].push_back(point_json(0, "", n, *c, 2));
      }
    }
    by_ensemble.push_back(std::move(series));
  }

  return json{{"by_resolution", by_resolution},
              {"by_style", by_style},
              {"by_ensemble", by_ensemble}};
}

}  // namespace mapcap::ablate
