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

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcap/ablate.hpp"
#include "mapcap/errors.hpp"

using namespace mapcap;
using namespace mapcap::ablate;

namespace {

AblationAxes small_axes() {
  AblationAxes axes;
  axes.resolutions = {256, 512};
  axes.styles = {MapStyleVariant::NoLabels, MapStyleVariant::AllLabels};
  axes.ensemble_sizes = {1, 3};
  return axes;
}

// FDR depends only on resolution, so cell means are easy to predict.
SampleMetrics synthetic_eval(const std::string&, int resolution_px,
                             MapStyleVariant, int) {
  return {resolution_px == 256 ? 0.4 : 0.2, 10.0};
}

}  // namespace

TEST_CASE("bootstrap intervals behave at the edges") {
  CHECK(bootstrap_ci95({}, 7) == std::pair<double, double>{0.0, 0.0});
  CHECK(bootstrap_ci95({0.3, 0.3, 0.3, 0.3}, 7) ==
        std::pair<double, double>{0.3, 0.3});
  // Zero resamples degrade to a point interval at the mean.
  CHECK(bootstrap_ci95({0.25, 0.75}, 7, 0) ==
        std::pair<double, double>{0.5, 0.5});
}

TEST_CASE("bootstrap intervals are seeded and bracket the mean") {
  const std::vector<double> values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  const auto a = bootstrap_ci95(values, 7, 500);
  const auto b = bootstrap_ci95(values, 7, 500);
  CHECK(a == b);
  const auto c = bootstrap_ci95(values, 8, 500);
  CHECK(a != c);
  CHECK(a.first <= 0.45);
  CHECK(a.second >= 0.45);
  CHECK(a.first < a.second);
}

TEST_CASE("cell seeds separate every cell of the full grid") {
  std::set<uint64_t> seeds;
  int cells = 0;
  for (int res : {256, 512, 1024}) {
    for (const auto style : kAllStyleVariants) {
      for (int n : {1, 3, 5}) {
        seeds.insert(cell_seed(7, res, style, n));
        ++cells;
      }
    }
  }
  CHECK(cells == 36);
  CHECK(seeds.size() == 36);
  CHECK(cell_seed(7, 256, MapStyleVariant::AllLabels, 1) !=
        cell_seed(8, 256, MapStyleVariant::AllLabels, 1));
}

TEST_CASE("the grid walks the axes in declaration order") {
  std::vector<std::string> visited;
  const auto result = run_grid(
      {"s1", "s2"}, small_axes(),
      [&](const std::string& id, int res, MapStyleVariant style, int n) {
        std::ostringstream key;
        key << id << ':' << res << ':' << style_slug(style) << ':' << n;
        visited.push_back(key.str());
        return synthetic_eval(id, res, style, n);
      },
      7, {}, 50);

  REQUIRE(result.cells.size() == 8);
  CHECK_FALSE(result.aborted);
  // 2 samples x 8 cells, sample-major inside each cell.
  REQUIRE(visited.size() == 16);
  CHECK(visited[0] == "s1:256:no-labels:1");
  CHECK(visited[1] == "s2:256:no-labels:1");
  CHECK(visited[2] == "s1:256:no-labels:3");
  CHECK(visited.back() == "s2:512:all-labels:3");

  CHECK(result.cells[0].resolution_px == 256);
  CHECK(result.cells[0].style == MapStyleVariant::NoLabels);
  CHECK(result.cells[0].n_prompts == 1);
  CHECK(result.cells[0].mean_fdr == 0.4);
  CHECK(result.cells[0].mean_uncertain_pct == 10.0);
  CHECK(result.cells[0].n_samples == 2);
  CHECK(result.cells[0].ci_lo == 0.4);  // constant per-sample values
  CHECK(result.cells.back().mean_fdr == 0.2);
}

TEST_CASE("the cell observer sees every completed cell in order") {
  std::vector<int> seen;
  run_grid(
      {"s1"}, small_axes(), synthetic_eval, 7,
      [&](const AblationCell& c) { seen.push_back(c.resolution_px); }, 10);
  CHECK(seen == std::vector<int>{256, 256, 256, 256, 512, 512, 512, 512});
}

TEST_CASE("budget exhaustion keeps the completed prefix") {
  int calls = 0;
  const auto result = run_grid(
      {"s1"}, small_axes(),
      [&](const std::string&, int res, MapStyleVariant style,
          int n) -> SampleMetrics {
        if (++calls == 6) throw BudgetError("spent");
        return synthetic_eval("", res, style, n);
      },
      7, {}, 10);
  CHECK(result.aborted);
  CHECK(result.cells.size() == 5);
}

TEST_CASE("non-budget failures propagate out of the grid") {
  CHECK_THROWS_AS(
      run_grid(
          {"s1"}, small_axes(),
          [](const std::string&, int, MapStyleVariant, int) -> SampleMetrics {
            throw std::runtime_error("backend exploded");
          },
          7, {}, 10),
      std::runtime_error);
}

TEST_CASE("csv output has a fixed header and sorted rows") {
  const auto result = run_grid({"s1", "s2"}, small_axes(), synthetic_eval, 7,
                               {}, 10);
  const auto csv = cells_to_csv(result.cells);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] ==
        "resolution,style,n_prompts,mean_fdr,ci_lo,ci_hi,mean_uncertain_pct,n");
  CHECK(std::is_sorted(lines.begin() + 1, lines.end()));
  CHECK(lines[1].rfind("256,all-labels,1,", 0) == 0);
  CHECK(lines[1].find("0.400000") != std::string::npos);
}

TEST_CASE("plot data groups series along each swept axis") {
  const auto axes = small_axes();
  const auto result = run_grid({"s1"}, axes, synthetic_eval, 7, {}, 10);
  const auto plot = cells_to_plot_data(result.cells, axes);

  REQUIRE(plot.at("by_resolution").size() == 2);  // one series per style
  const auto& series = plot["by_resolution"][0];
  CHECK(series.at("style") == "no-labels");
  CHECK(series.at("n_prompts") == 3);
  REQUIRE(series.at("points").size() == 2);
  CHECK(series["points"][0].at("mean_fdr") == 0.4);
  CHECK(series["points"][1].at("mean_fdr") == 0.2);

  REQUIRE(plot.at("by_style").size() == 2);  // one series per resolution
  CHECK(plot["by_style"][0].at("resolution_px") == 256);
  REQUIRE(plot["by_style"][0].at("points").size() == 2);

  REQUIRE(plot.at("by_ensemble").size() == 2);
  REQUIRE(plot["by_ensemble"][0].at("points").size() == 2);
}

TEST_CASE("ablation cells round trip and reject unknown styles") {
  AblationCell cell;
  cell.resolution_px = 512;
  cell.style = MapStyleVariant::StreetsOnly;
  cell.n_prompts = 5;
  cell.mean_fdr = 0.25;
  cell.mean_uncertain_pct = 12.5;
  cell.ci_lo = 0.2;
  cell.ci_hi = 0.3;
  cell.n_samples = 10;

  nlohmann::json j = cell;
  CHECK(j.at("style") == "streets-only");
  const auto back = j.get<AblationCell>();
  CHECK(back.style == MapStyleVariant::StreetsOnly);
  CHECK(nlohmann::json(back) == j);

  j["style"] = "watercolor";
  CHECK_THROWS_AS(j.get<AblationCell>(), SchemaError);

  AblationResult result;
  result.cells = {cell};
  result.aborted = true;
  nlohmann::json rj = result;
  const auto rback = rj.get<AblationResult>();
  CHECK(rback.aborted);
  REQUIRE(rback.cells.size() == 1);
  CHECK(rback.cells[0].resolution_px == 512);
}
