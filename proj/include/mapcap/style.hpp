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

#ifndef MAPCAP_STYLE_HPP_
#define MAPCAP_STYLE_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace mapcap {

// Label layers rendered on a requested map. The variants form a lattice for
// reference building: NoLabels below LandmarksOnly and StreetsOnly, both
// below AllLabels.
enum class MapStyleVariant { AllLabels, LandmarksOnly, StreetsOnly, NoLabels };

inline constexpr std::array<MapStyleVariant, 4> kAllStyleVariants = {
    MapStyleVariant::AllLabels, MapStyleVariant::LandmarksOnly,
    MapStyleVariant::StreetsOnly, MapStyleVariant::NoLabels};

inline std::string style_slug(MapStyleVariant v) {
  switch (v) {
    case MapStyleVariant::AllLabels: return "all-labels";
    case MapStyleVariant::LandmarksOnly: return "landmarks-only";
    case MapStyleVariant::StreetsOnly: return "streets-only";
    case MapStyleVariant::NoLabels: return "no-labels";
  }
  return "all-labels";
}

inline std::optional<MapStyleVariant> style_from_slug(std::string_view slug) {
  for (const auto v : kAllStyleVariants) {
    if (style_slug(v) == slug) return v;
  }
  return std::nullopt;
}

// A style variant paired with the provider-specific identifier that goes into
// the request URL.
struct MapStyle {
  MapStyleVariant variant = MapStyleVariant::AllLabels;
  std::string style_id;

  std::string slug() const { return style_slug(variant); }
};

}  // namespace mapcap

#endif  // MAPCAP_STYLE_HPP_
