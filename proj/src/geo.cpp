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

#include "mapcap/geo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mapcap/errors.hpp"

namespace mapcap::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;

double world_size_px(int zoom) {
  // 256 * 2^zoom is exact in doubles for zoom <= 22.
  return 256.0 * static_cast<double>(1 << zoom);
}

bool box_fits_at(const GeoBoundingBox& box, int zoom, int resolution_px) {
  const auto [x_w, y_s] = lonlat_to_world_pixel({box.south, box.west}, zoom);
  const auto [x_e, y_n] = lonlat_to_world_pixel({box.north, box.east}, zoom);
  return (x_e - x_w) <= resolution_px && (y_s - y_n) <= resolution_px;
}

void replace_all_or_throw(std::string& text, const std::string& placeholder,
                          const std::string& value) {
  std::size_t pos = text.find(placeholder);
  if (pos == std::string::npos) {
    throw TemplateError(placeholder,
                        "endpoint template lacks placeholder " + placeholder);
  }
  while (pos != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos = text.find(placeholder, pos + value.size());
  }
}

}  // namespace

bool point_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) &&
         p.lat >= -kMaxMercatorLatDeg && p.lat <= kMaxMercatorLatDeg &&
         p.lon >= -180.0 && p.lon < 180.0;
}

void validate_point(const GeoPoint& p) {
  if (!point_valid(p)) {
    std::ostringstream msg;
    msg << "point out of range: lat=" << p.lat << " lon=" << p.lon;
    throw DomainError(msg.str());
  }
}

bool box_valid(const GeoBoundingBox& b) {
  return std::isfinite(b.south) && std::isfinite(b.west) &&
         std::isfinite(b.north) && std::isfinite(b.east) && b.south < b.north &&
         b.west < b.east && b.south >= -kMaxMercatorLatDeg &&
         b.north <= kMaxMercatorLatDeg && b.west >= -180.0 && b.east <= 180.0;
}

void validate_box(const GeoBoundingBox& b) {
  if (!box_valid(b)) {
    std::ostringstream msg;
    msg << "invalid bounding box: south=" << b.south << " west=" << b.west
        << " north=" << b.north << " east=" << b.east;
    throw DomainError(msg.str());
  }
}

void to_json(nlohmann::json& j, const MapRequestSpec& s) {
  j = nlohmann::json{{"center", {{"lat", s.center.lat}, {"lon", s.center.lon}}},
                     {"zoom", s.zoom},
                     {"resolution_px", s.resolution_px},
                     {"style", s.style.slug()},
                     {"style_id", s.style.style_id},
                     {"endpoint_template", s.endpoint_template},
                     {"url", s.url}};
}

void from_json(const nlohmann::json& j, MapRequestSpec& s) {
  s.center.lat = j.at("center").at("lat").get<double>();
  s.center.lon = j.at("center").at("lon").get<double>();
  s.zoom = j.at("zoom").get<int>();
  s.resolution_px = j.at("resolution_px").get<int>();
  const auto slug = j.at("style").get<std::string>();
  const auto variant = style_from_slug(slug);
  if (!variant) throw DomainError("unknown style slug: " + slug);
  s.style.variant = *variant;
  s.style.style_id = j.at("style_id").get<std::string>();
  s.endpoint_template = j.at("endpoint_template").get<std::string>();
  s.url = j.at("url").get<std::string>();
}

GeoBoundingBox derive_footprint(const GeoPoint& center, double gsd_m_per_px,
                                int img_width_px, int img_height_px) {
  validate_point(center);
  if (!(gsd_m_per_px > 0.0) || !std::isfinite(gsd_m_per_px)) {
    throw DomainError("gsd must be positive");
  }
  if (img_width_px <= 0 || img_height_px <= 0) {
    throw DomainError("image dimensions must be positive");
  }
  const double cos_lat = std::cos(center.lat * kPi / 180.0);
  if (cos_lat <= 1e-6) {
    throw DomainError("footprint degenerate near the pole");
  }
  const double lat_span = gsd_m_per_px * img_height_px / kMetersPerDegree;
  const double lon_span =
      gsd_m_per_px * img_width_px / (kMetersPerDegree * cos_lat);
  GeoBoundingBox box{center.lat - lat_span / 2, center.lon - lon_span / 2,
                     center.lat + lat_span / 2, center.lon + lon_span / 2};
  if (!box_valid(box)) {
    throw DomainError("footprint leaves the valid coordinate range");
  }
  return box;
}

std::pair<double, double> lonlat_to_world_pixel(const GeoPoint& p, int zoom) {
  // lon == 180 maps to the east edge (x == world size); everything else
  // follows the point contract.
  const bool east_edge = p.lon == 180.0;
  if (!east_edge) validate_point(p);
  if (east_edge &&
      (p.lat < -kMaxMercatorLatDeg || p.lat > kMaxMercatorLatDeg)) {
    throw DomainError("latitude out of Mercator range");
  }
  if (zoom < 0 || zoom > kMaxZoom) {
    throw DomainError("zoom out of range");
  }
  const double size = world_size_px(zoom);
  const double phi = p.lat * kPi / 180.0;
  const double x = (p.lon + 180.0) / 360.0 * size;
  // asinh(tan(phi)) equals log(tan(phi) + sec(phi)) but does not cancel in
  // the southern hemisphere, where tan and sec nearly annihilate; the naive
  // form is off by whole micropixels at high zoom.
  const double y = (1.0 - std::asinh(std::tan(phi)) / kPi) / 2.0 * size;
  return {x, y};
}

GeoPoint world_pixel_to_lonlat(double x, double y, int zoom) {
  if (zoom < 0 || zoom > kMaxZoom) {
    throw DomainError("zoom out of range");
  }
  const double size = world_size_px(zoom);
  const double lon = x / size * 360.0 - 180.0;
  const double lat =
      std::atan(std::sinh(kPi * (1.0 - 2.0 * y / size))) * 180.0 / kPi;
  return {lat, lon};
}

int fit_zoom(const GeoBoundingBox& box, int resolution_px) {
  validate_box(box);
  if (resolution_px <= 0) {
    throw DomainError("resolution must be positive");
  }
  // Both extents scale by exactly 2 per zoom step (power-of-two multiply),
  // so fitting is monotone in zoom and an analytic guess plus local
  // correction agrees with a full scan.
  const auto [x_w, y_s] = lonlat_to_world_pixel({box.south, box.west}, 0);
  const auto [x_e, y_n] = lonlat_to_world_pixel({box.north, box.east}, 0);
  const double extent0 = std::max(x_e - x_w, y_s - y_n);
  int z;
  if (extent0 <= 0.0) {
    z = kMaxZoom;
  } else {
    const double guess = std::floor(std::log2(resolution_px / extent0));
    z = static_cast<int>(std::clamp(guess, 0.0, double(kMaxZoom)));
  }
  while (z < kMaxZoom && box_fits_at(box, z + 1, resolution_px)) ++z;
  while (z > 0 && !box_fits_at(box, z, resolution_px)) --z;
  return z;
}

std::string format_coord(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string out(buf);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

MapRequestSpec build_map_request(const GeoBoundingBox& box, int resolution_px,
                                 const MapStyle& style,
                                 const std::string& endpoint_template,
                                 int zoom_offset) {
  validate_box(box);
  if (resolution_px <= 0) {
    throw DomainError("resolution must be positive");
  }
  MapRequestSpec spec;
  spec.center = box.center();
  spec.zoom = std::clamp(fit_zoom(box, resolution_px) + zoom_offset, 0, kMaxZoom);
  spec.resolution_px = resolution_px;
  spec.style = style;
  spec.endpoint_template = endpoint_template;

  std::string url = endpoint_template;
  replace_all_or_throw(url, "{lon}", format_coord(spec.center.lon));
  replace_all_or_throw(url, "{lat}", format_coord(spec.center.lat));
  replace_all_or_throw(url, "{zoom}", std::to_string(spec.zoom));
  replace_all_or_throw(url, "{w}", std::to_string(resolution_px));
  replace_all_or_throw(url, "{h}", std::to_string(resolution_px));
  replace_all_or_throw(url, "{style}", style.style_id);
  spec.url = url;
  return spec;
}

std::string map_tile_filename(const std::string& sample_id,
                              const std::string& style_slug,
                              int resolution_px) {
  return sample_id + "_" + style_slug + "_" + std::to_string(resolution_px) +
         ".png";
}

bool parse_map_tile_filename(const std::string& filename,
                             std::string* sample_id, std::string* style_slug,
                             int* resolution_px) {
  const std::string suffix = ".png";
  if (filename.size() <= suffix.size() ||
      filename.compare(filename.size() - suffix.size(), suffix.size(),
                       suffix) != 0) {
    return false;
  }
  const std::string stem = filename.substr(0, filename.size() - suffix.size());
  const auto last = stem.rfind('_');
  if (last == std::string::npos || last + 1 >= stem.size()) return false;
  const std::string res_part = stem.substr(last + 1);
  for (const char c : res_part) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  const auto second = stem.rfind('_', last - 1);
  if (second == std::string::npos || second == 0) return false;
  const std::string style_part = stem.substr(second + 1, last - second - 1);
  if (style_part.empty() || !style_from_slug(style_part)) return false;
  if (sample_id) *sample_id = stem.substr(0, second);
  if (style_slug) *style_slug = style_part;
  if (resolution_px) *resolution_px = std::stoi(res_part);
  return true;
}

}  // namespace mapcap::geo
