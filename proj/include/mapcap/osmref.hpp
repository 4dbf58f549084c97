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

#ifndef MAPCAP_OSMREF_HPP_
#define MAPCAP_OSMREF_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mapcap/geo.hpp"
#include "mapcap/ingest.hpp"
#include "mapcap/retry.hpp"
#include "mapcap/style.hpp"

namespace mapcap::osmref {

inline const std::vector<std::string> kDefaultTagKeys = {
    "name", "name:en", "alt_name", "short_name", "brand", "operator"};

enum class OsmKind { Node, Way, Relation };

struct OsmElement {
  int64_t element_id = 0;
  OsmKind kind = OsmKind::Node;
  std::map<std::string, std::string> tags;
  std::optional<geo::GeoPoint> point;      // representative point
  std::optional<geo::GeoBoundingBox> box;  // way/relation bounds

  bool is_street() const { return tags.count("highway") > 0; }
};

struct RefProvenance {
  std::string entry;   // normalized entry this source produced
  std::string source;  // "tag:<key>@<kind>/<id>" or "metadata:<field>"
};

struct ReferenceList {
  std::vector<std::string> entries;  // normalized, deduplicated, sorted
  std::vector<RefProvenance> provenance;
  bool vacuous() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

void to_json(nlohmann::json& j, const ReferenceList& r);
void from_json(const nlohmann::json& j, ReferenceList& r);

// Canonical matching form: compatibility-folded, lowercased, punctuation
// turned into spaces, whitespace collapsed and trimmed. Idempotent.
std::string normalize_name(std::string_view s);

// Parses an OSM JSON interchange document ("elements" array). Elements
// without a tags object are dropped; geometry comes from lat/lon, center or
// bounds. ParseError carries the byte offset for malformed input.
std::vector<OsmElement> parse_osm_extract(std::string_view raw);

// True when the element lies in the box: point containment for nodes (and
// anything carrying only a representative point), box intersection for
// elements with bounds.
bool element_in_box(const OsmElement& e, const geo::GeoBoundingBox& box);

// Assembles the reference names a caption may legitimately mention: style-
// filtered map labels inside the footprint plus the sample's own location
// metadata. Streets are elements tagged `highway`; everything else named is
// a landmark. NoLabels keeps metadata entries only.
ReferenceList build_reference_list(const std::vector<OsmElement>& elements,
                                   const geo::GeoBoundingBox& box,
                                   const MapStyle& style,
                                   const ingest::SampleRecord& sample,
                                   const std::vector<std::string>& tag_keys =
                                       kDefaultTagKeys);

// Overpass-style bbox query body for the configured tag keys' carriers.
std::string overpass_query(const geo::GeoBoundingBox& box);

// Fetches elements from an Overpass-compatible endpoint, sharing the parse
// path and retry behavior of the offline route. endpoint_url is the full
// interpreter URL.
std::vector<OsmElement> fetch_overpass(const std::string& endpoint_url,
                                       const geo::GeoBoundingBox& box,
                                       const retry::RetryPolicy& policy,
                                       uint64_t seed);

}  // namespace mapcap::osmref

#endif  // MAPCAP_OSMREF_HPP_
