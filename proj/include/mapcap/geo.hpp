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

#ifndef MAPCAP_GEO_HPP_
#define MAPCAP_GEO_HPP_

#include <string>
#include <utility>

#include <json.hpp>

#include "mapcap/style.hpp"

namespace mapcap::geo {

// Web-Mercator validity bound: atan(sinh(pi)) rounded to 8 decimals.
inline constexpr double kMaxMercatorLatDeg = 85.05112878;
inline constexpr int kMaxZoom = 22;
inline constexpr double kMetersPerDegree = 111320.0;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

struct GeoBoundingBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;

  GeoPoint center() const { return {(south + north) / 2, (west + east) / 2}; }
};

// lat within the Mercator range, lon in [-180, 180).
bool point_valid(const GeoPoint& p);
void validate_point(const GeoPoint& p);

// south < north, west < east, corners in range. east may equal 180 exactly
// so whole-world footprints stay representable; antimeridian-crossing boxes
// are rejected.
bool box_valid(const GeoBoundingBox& b);
void validate_box(const GeoBoundingBox& b);

struct MapRequestSpec {
  GeoPoint center;
  int zoom = 0;
  int resolution_px = 0;
  MapStyle style;
  std::string endpoint_template;
  std::string url;  // template with all placeholders substituted
};

void to_json(nlohmann::json& j, const MapRequestSpec& s);
void from_json(const nlohmann::json& j, MapRequestSpec& s);

// Box centered on `center` covering gsd*width x gsd*height meters, using the
// spherical small-angle conversion (kMetersPerDegree per degree of latitude,
// scaled by cos(lat) for longitude). DomainError on polar degeneracy or when
// the box leaves the valid range.
GeoBoundingBox derive_footprint(const GeoPoint& center, double gsd_m_per_px,
                                int img_width_px, int img_height_px);

// Global Web-Mercator pixel coordinates at the given zoom; the world is
// 256*2^zoom pixels square. lon == 180 is accepted and maps to the east edge.
std::pair<double, double> lonlat_to_world_pixel(const GeoPoint& p, int zoom);

// Analytic inverse of lonlat_to_world_pixel.
GeoPoint world_pixel_to_lonlat(double x, double y, int zoom);

// Maximum zoom in [0, 22] at which both pixel extents of the box fit within
// resolution_px; 0 when the box overflows even the coarsest level.
int fit_zoom(const GeoBoundingBox& box, int resolution_px);

// Resolves the template into a concrete request. All six placeholders
// {lon} {lat} {zoom} {w} {h} {style} must appear; coordinates are formatted
// at 6 decimals with negative zero normalized. zoom_offset shifts the fitted
// zoom and is clamped back into [0, 22].
MapRequestSpec build_map_request(const GeoBoundingBox& box, int resolution_px,
                                 const MapStyle& style,
                                 const std::string& endpoint_template,
                                 int zoom_offset = 0);

// Fixed 6-decimal coordinate formatting; "-0.000000" becomes "0.000000".
std::string format_coord(double value);

// Tile files are named <sample_id>_<style-slug>_<resolution>.png.
std::string map_tile_filename(const std::string& sample_id,
                              const std::string& style_slug, int resolution_px);

// Splits a tile filename back into its parts. Returns false when the name
// does not match the pattern. sample ids may themselves contain underscores,
// so the split works from the right.
bool parse_map_tile_filename(const std::string& filename, std::string* sample_id,
                             std::string* style_slug, int* resolution_px);

}  // namespace mapcap::geo

#endif  // MAPCAP_GEO_HPP_
