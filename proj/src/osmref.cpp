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

#include "mapcap/osmref.hpp"

#include <httplib.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "mapcap/errors.hpp"
#include "mapcap/httputil.hpp"
#include "mapcap/jsonio.hpp"
#include "mapcap/textutil.hpp"

namespace mapcap::osmref {

namespace {

const char* kind_name(OsmKind k) {
  switch (k) {
    case OsmKind::Node: return "node";
    case OsmKind::Way: return "way";
    case OsmKind::Relation: return "relation";
  }
  return "node";
}

bool style_admits(const MapStyle& style, const OsmElement& e) {
  switch (style.variant) {
    case MapStyleVariant::AllLabels: return true;
    case MapStyleVariant::LandmarksOnly: return !e.is_street();
    case MapStyleVariant::StreetsOnly: return e.is_street();
    case MapStyleVariant::NoLabels: return false;
  }
  return false;
}

}  // namespace

std::string normalize_name(std::string_view s) {
  namespace tu = mapcap::textutil;
  std::vector<uint32_t> folded;
  folded.reserve(s.size());
  for (const auto& c : tu::decode_utf8(s)) {
    tu::fold_compat(c.cp, folded);
  }
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (const uint32_t raw : folded) {
    const uint32_t cp = tu::to_lower(raw);
    if (tu::is_letter(cp) || tu::is_ascii_digit(cp)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      tu::append_utf8(out, cp);
    } else {
      pending_space = true;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ReferenceList& r) {
  auto prov = nlohmann::json::array();
  for (const auto& p : r.provenance) {
    prov.push_back({{"entry", p.entry}, {"source", p.source}});
  }
  j = nlohmann::json{{"entries", r.entries},
                     {"provenance", prov},
                     {"vacuous", r.vacuous()}};
}

void from_json(const nlohmann::json& j, ReferenceList& r) {
  r.entries = j.at("entries").get<std::vector<std::string>>();
  r.provenance.clear();
  for (const auto& p : j.at("provenance")) {
    r.provenance.push_back({p.at("entry").get<std::string>(),
                            p.at("source").get<std::string>()});
  }
}

std::vector<OsmElement> parse_osm_extract(std::string_view raw) {
  const nlohmann::json doc = jsonio::parse_json(raw, "osm extract");
  if (!doc.is_object() || !doc.contains("elements") ||
      !doc.at("elements").is_array()) {
    throw ParseError("osm extract lacks an elements array");
  }
  std::vector<OsmElement> out;
  for (const auto& el : doc.at("elements")) {
    if (!el.is_object()) continue;
    if (!el.contains("tags") || !el.at("tags").is_object()) continue;
    const std::string type = el.value("type", "");
    OsmElement e;
    if (type == "node") {
      e.kind = OsmKind::Node;
    } else if (type == "way") {
      e.kind = OsmKind::Way;
    } else if (type == "relation") {
      e.kind = OsmKind::Relation;
    } else {
      continue;
    }
    e.element_id = el.value("id", static_cast<int64_t>(0));
    for (const auto& [k, v] : el.at("tags").items()) {
      if (v.is_string()) e.tags[k] = v.get<std::string>();
    }
    if (el.contains("lat") && el.contains("lon") &&
        el.at("lat").is_number() && el.at("lon").is_number()) {
      e.point = geo::GeoPoint{el.at("lat").get<double>(),
                              el.at("lon").get<double>()};
    }
    if (el.contains("center") && el.at("center").is_object()) {
      const auto& c = el.at("center");
      if (c.contains("lat") && c.contains("lon")) {
        e.point = geo::GeoPoint{c.at("lat").get<double>(),
                                c.at("lon").get<double>()};
      }
    }
    if (el.contains("bounds") && el.at("bounds").is_object()) {
      const auto& b = el.at("bounds");
      if (b.contains("minlat") && b.contains("minlon") &&
          b.contains("maxlat") && b.contains("maxlon")) {
        e.box = geo::GeoBoundingBox{
            b.at("minlat").get<double>(), b.at("minlon").get<double>(),
            b.at("maxlat").get<double>(), b.at("maxlon").get<double>()};
        if (!e.point) {
          e.point = geo::GeoPoint{(e.box->south + e.box->north) / 2,
                                  (e.box->west + e.box->east) / 2};
        }
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

bool element_in_box(const OsmElement& e, const geo::GeoBoundingBox& box) {
  if (e.box) {
    return !(e.box->north < box.south || e.box->south > box.north ||
             e.box->east < box.west || e.box->west > box.east);
  }
  if (e.point) {
    return e.point->lat >= box.south && e.point->lat <= box.north &&
           e.point->lon >= box.west && e.point->lon <= box.east;
  }
  return false;
}

ReferenceList build_reference_list(const std::vector<OsmElement>& elements,
                                   const geo::GeoBoundingBox& box,
                                   const MapStyle& style,
                                   const ingest::SampleRecord& sample,
                                   const std::vector<std::string>& tag_keys) {
  std::set<std::string> entries;
  std::set<std::pair<std::string, std::string>> provenance;

  for (const auto& e : elements) {
    if (!element_in_box(e, box)) continue;
    if (!style_admits(style, e)) continue;
    for (const auto& key : tag_keys) {
      const auto it = e.tags.find(key);
      if (it == e.tags.end() || it->second.empty()) continue;
      const std::string n = normalize_name(it->second);
      if (n.empty()) continue;
      entries.insert(n);
      std::ostringstream src;
      src << "tag:" << key << "@" << kind_name(e.kind) << "/" << e.element_id;
      provenance.insert({n, src.str()});
    }
  }

  // Location metadata names are always fair game for a caption, whatever the
  // map shows.
  const std::pair<const std::optional<std::string>*, const char*> meta[] = {
      {&sample.city, "metadata:city"},
      {&sample.region, "metadata:region"},
      {&sample.country, "metadata:country"}};
  for (const auto& [value, source] : meta) {
    if (!*value) continue;
    const std::string n = normalize_name(**value);
    if (n.empty()) continue;
    entries.insert(n);
    provenance.insert({n, source});
  }
  // Category tokens enter only when they read as proper nouns.
  {
    namespace tu = mapcap::textutil;
    const auto chars = tu::decode_utf8(sample.category);
    std::size_t i = 0;
    while (i < chars.size()) {
      if (!tu::is_letter(chars[i].cp)) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < chars.size() && tu::is_letter(chars[i].cp)) ++i;
      if (tu::is_upper(chars[start].cp)) {
        const std::size_t from = chars[start].offset;
        const std::size_t to = chars[i - 1].offset + chars[i - 1].length;
        const std::string n =
            normalize_name(sample.category.substr(from, to - from));
        if (!n.empty()) {
          entries.insert(n);
          provenance.insert({n, "metadata:category"});
        }
      }
    }
  }

  ReferenceList out;
  out.entries.assign(entries.begin(), entries.end());
  for (const auto& [entry, source] : provenance) {
    out.provenance.push_back({entry, source});
  }
  return out;
}

std::string overpass_query(const geo::GeoBoundingBox& box) {
  geo::validate_box(box);
  std::ostringstream bbox;
  bbox << geo::format_coord(box.south) << "," << geo::format_coord(box.west)
       << "," << geo::format_coord(box.north) << ","
       << geo::format_coord(box.east);
  std::ostringstream q;
  q << "[out:json][timeout:60];(node[\"name\"](" << bbox.str() << ");way[\"name\"]("
    << bbox.str() << ");relation[\"name\"](" << bbox.str()
    << "););out tags center;";
  return q.str();
}

std::vector<OsmElement> fetch_overpass(const std::string& endpoint_url,
                                       const geo::GeoBoundingBox& box,
                                       const retry::RetryPolicy& policy,
                                       uint64_t seed) {
  const auto url = httputil::split_url(endpoint_url);
  const std::string body = "data=" + overpass_query(box);
  std::string response;
  retry::run_with_retry(
      [&] {
        httplib::Client client(url.base);
        client.set_read_timeout(60, 0);
        auto res = client.Post(url.path, body,
                               "application/x-www-form-urlencoded");
        if (!res) {
          throw BackendError("overpass transport failure", /*retryable=*/true);
        }
        if (res->status < 200 || res->status >= 300) {
          throw BackendError("overpass HTTP " + std::to_string(res->status),
                             httputil::retryable_status(res->status),
                             res->status);
        }
        response = res->body;
      },
      policy, seed, "overpass");
  return parse_osm_extract(response);
}

}  // namespace mapcap::osmref
