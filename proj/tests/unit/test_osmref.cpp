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
#include <string>
#include <vector>

#include "mapcap/errors.hpp"
#include "mapcap/osmref.hpp"
#include "test_support.hpp"

using namespace mapcap;
using namespace mapcap::osmref;

namespace {

const geo::GeoBoundingBox kLyonBox{45.755, 4.825, 45.764, 4.84};

ingest::SampleRecord lyon_sample() {
  ingest::SampleRecord s;
  s.id = "s1";
  s.category = "stadium";
  s.point = {45.7596, 4.8322};
  s.gsd = 0.5;
  s.city = "Lyon";
  s.country = "France";
  s.footprint = kLyonBox;
  return s;
}

std::vector<OsmElement> lyon_elements() {
  const auto path = testsupport::fixtures_dir() / "osm" / "lyon_extract.json";
  return parse_osm_extract(testsupport::read_file(path));
}

bool contains(const ReferenceList& r, const std::string& entry) {
  return std::find(r.entries.begin(), r.entries.end(), entry) !=
         r.entries.end();
}

bool subset(const ReferenceList& a, const ReferenceList& b) {
  const std::set<std::string> bs(b.entries.begin(), b.entries.end());
  return std::all_of(a.entries.begin(), a.entries.end(),
                     [&](const std::string& e) { return bs.count(e) > 0; });
}

MapStyle style_of(MapStyleVariant v) { return {v, style_slug(v)}; }

}  // namespace

TEST_CASE("parse_osm_extract keeps tagged elements and their geometry") {
  const auto path = testsupport::fixtures_dir() / "osm" / "mini_extract.json";
  const auto elements = parse_osm_extract(testsupport::read_file(path));
  REQUIRE(elements.size() == 4);
  int named = 0, streets = 0;
  for (const auto& e : elements) {
    if (e.tags.count("name")) ++named;
    if (e.is_street()) ++streets;
  }
  CHECK(named == 3);
  CHECK(streets == 1);
  // The way carries only a center point; it still gets a representative
  // point for containment tests.
  const auto way = std::find_if(elements.begin(), elements.end(),
                                [](const OsmElement& e) {
                                  return e.kind == OsmKind::Way;
                                });
  REQUIRE(way != elements.end());
  CHECK(way->point.has_value());
}

TEST_CASE("parse_osm_extract rejects malformed documents") {
  CHECK_THROWS_AS(parse_osm_extract("{\"elements\": [truncated"), ParseError);
  CHECK_THROWS_AS(parse_osm_extract("{\"no_elements\": true}"), ParseError);
  CHECK(parse_osm_extract("{\"elements\": []}").empty());
}

TEST_CASE("element containment: points inside, boxes by intersection") {
  OsmElement node;
  node.point = geo::GeoPoint{45.76, 4.83};
  CHECK(element_in_box(node, kLyonBox));
  node.point = geo::GeoPoint{45.70, 4.83};
  CHECK_FALSE(element_in_box(node, kLyonBox));

  OsmElement way;
  way.box = geo::GeoBoundingBox{45.763, 4.839, 45.770, 4.850};  // overlaps corner
  CHECK(element_in_box(way, kLyonBox));
  way.box = geo::GeoBoundingBox{45.80, 4.9, 45.81, 4.95};
  CHECK_FALSE(element_in_box(way, kLyonBox));
}

TEST_CASE("no-labels references carry only sample metadata") {
  const auto refs =
      build_reference_list({}, kLyonBox, style_of(MapStyleVariant::NoLabels),
                           lyon_sample());
  CHECK(refs.entries == std::vector<std::string>{"france", "lyon"});
  for (const auto& p : refs.provenance) {
    CHECK(p.source.rfind("metadata:", 0) == 0);
  }
}

TEST_CASE("landmarks-only keeps parks and drops streets") {
  const auto refs = build_reference_list(
      lyon_elements(), kLyonBox, style_of(MapStyleVariant::LandmarksOnly),
      lyon_sample());
  CHECK(contains(refs, "parc central"));
  CHECK_FALSE(contains(refs, "rue a"));
  CHECK_FALSE(contains(refs, "avenue berthelot"));
}

TEST_CASE("streets-only keeps streets and drops landmarks") {
  const auto refs = build_reference_list(
      lyon_elements(), kLyonBox, style_of(MapStyleVariant::StreetsOnly),
      lyon_sample());
  CHECK(contains(refs, "rue a"));
  CHECK_FALSE(contains(refs, "parc central"));
  // Metadata names survive every style.
  CHECK(contains(refs, "lyon"));
}

TEST_CASE("all-labels includes both label classes") {
  const auto refs = build_reference_list(
      lyon_elements(), kLyonBox, style_of(MapStyleVariant::AllLabels),
      lyon_sample());
  CHECK(contains(refs, "parc central"));
  CHECK(contains(refs, "rue a"));
  CHECK(contains(refs, "mus\xC3\xA9\x65 des confluences"));
}

TEST_CASE("style lattice holds on the fixture extract") {
  const auto elements = lyon_elements();
  const auto sample = lyon_sample();
  const auto by = [&](MapStyleVariant v) {
    return build_reference_list(elements, kLyonBox, style_of(v), sample);
  };
  const auto none = by(MapStyleVariant::NoLabels);
  const auto landmarks = by(MapStyleVariant::LandmarksOnly);
  const auto streets = by(MapStyleVariant::StreetsOnly);
  const auto all = by(MapStyleVariant::AllLabels);
  CHECK(subset(none, landmarks));
  CHECK(subset(landmarks, all));
  CHECK(subset(none, streets));
  CHECK(subset(streets, all));
}

TEST_CASE("reference building is monotone in elements") {
  auto elements = lyon_elements();
  const auto before = build_reference_list(
      elements, kLyonBox, style_of(MapStyleVariant::AllLabels), lyon_sample());
  OsmElement extra;
  extra.element_id = 9999;
  extra.tags["name"] = "Nouvelle Halle";
  extra.point = geo::GeoPoint{45.76, 4.832};
  elements.push_back(extra);
  const auto after = build_reference_list(
      elements, kLyonBox, style_of(MapStyleVariant::AllLabels), lyon_sample());
  CHECK(subset(before, after));
  CHECK(contains(after, "nouvelle halle"));
}

TEST_CASE("entries outside the footprint are excluded") {
  const auto refs = build_reference_list(
      lyon_elements(), kLyonBox, style_of(MapStyleVariant::AllLabels),
      lyon_sample());
  CHECK_FALSE(contains(refs, "a\xC3\xA9roport saint exup\xC3\xA9ry"));
}

TEST_CASE("entries are normalized, deduplicated and sorted") {
  std::vector<OsmElement> elements;
  for (int i = 0; i < 2; ++i) {
    OsmElement e;
    e.element_id = 100 + i;
    e.tags["name"] = i == 0 ? "Parc  Central" : "PARC CENTRAL";
    e.point = geo::GeoPoint{45.76, 4.832};
    elements.push_back(e);
  }
  const auto refs = build_reference_list(
      elements, kLyonBox, style_of(MapStyleVariant::AllLabels), lyon_sample());
  CHECK(std::count(refs.entries.begin(), refs.entries.end(), "parc central") ==
        1);
  CHECK(std::is_sorted(refs.entries.begin(), refs.entries.end()));
  // Both elements still appear as provenance for the shared entry.
  int sources = 0;
  for (const auto& p : refs.provenance) {
    if (p.entry == "parc central") ++sources;
  }
  CHECK(sources == 2);
}

TEST_CASE("alternate tag keys feed entries with tag provenance") {
  OsmElement e;
  e.element_id = 7;
  e.tags["brand"] = "Carrefour";
  e.tags["highway"] = "primary";  // street, so landmarks-only must drop it
  e.point = geo::GeoPoint{45.76, 4.832};
  const auto all = build_reference_list(
      {e}, kLyonBox, style_of(MapStyleVariant::AllLabels), lyon_sample());
  CHECK(contains(all, "carrefour"));
  bool tagged = false;
  for (const auto& p : all.provenance) {
    if (p.entry == "carrefour" && p.source.rfind("tag:brand@", 0) == 0) {
      tagged = true;
    }
  }
  CHECK(tagged);
  const auto landmarks = build_reference_list(
      {e}, kLyonBox, style_of(MapStyleVariant::LandmarksOnly), lyon_sample());
  CHECK_FALSE(contains(landmarks, "carrefour"));
}

TEST_CASE("empty reference lists are valid and vacuous") {
  ingest::SampleRecord bare;
  bare.id = "bare";
  bare.category = "field";
  bare.footprint = kLyonBox;
  const auto refs = build_reference_list(
      {}, kLyonBox, style_of(MapStyleVariant::NoLabels), bare);
  CHECK(refs.vacuous());
  CHECK(refs.size() == 0);
}

TEST_CASE("overpass query carries the bbox and tag filters") {
  const auto q = overpass_query(kLyonBox);
  CHECK(q.find("45.755") != std::string::npos);
  CHECK(q.find("4.84") != std::string::npos);
  CHECK(q.find("name") != std::string::npos);
  CHECK(q.find("out") != std::string::npos);
}
