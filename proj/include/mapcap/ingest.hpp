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

#ifndef MAPCAP_INGEST_HPP_
#define MAPCAP_INGEST_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mapcap/geo.hpp"

namespace mapcap::ingest {

// One curated sample: geolocated source image plus the metadata the caption
// and reference stages consume.
struct SampleRecord {
  std::string id;
  std::string category;
  geo::GeoPoint point;
  double gsd = 0.0;  // meters per pixel
  std::string timestamp;  // RFC 3339 as ingested (normalized to UTC 'Z' form)
  int64_t timestamp_epoch_s = 0;
  int img_width_px = 0;
  int img_height_px = 0;
  std::optional<std::string> city;
  std::optional<std::string> region;
  std::optional<std::string> country;
  std::string image_path;
  geo::GeoBoundingBox footprint;
  bool footprint_explicit = false;
};

void to_json(nlohmann::json& j, const SampleRecord& r);
void from_json(const nlohmann::json& j, SampleRecord& r);

// Parses one metadata document. ParseError for non-JSON bytes;
// ValidationError naming the offending field otherwise. The footprint is
// derived from point/gsd/dims when the document does not supply one.
SampleRecord parse_metadata(std::string_view raw);

// Seconds since the Unix epoch for an RFC 3339 timestamp. Accepts 'Z',
// numeric offsets and (logged upstream) timezone-less inputs, which are read
// as UTC. ValidationError on anything else.
int64_t parse_rfc3339_epoch(const std::string& text);

// Inverse of the above for whole seconds: "YYYY-MM-DDThh:mm:ssZ".
std::string format_utc(int64_t epoch_s);

struct CorpusLoad {
  std::vector<SampleRecord> records;  // lexicographic by filename
  struct Skip {
    std::string file;
    std::string reason;
  };
  std::vector<Skip> skips;
};

// Loads every *.meta.json under dir. Per-file failures become skip entries;
// only an unreadable directory is fatal (IoError). Duplicate ids keep the
// first occurrence and skip the rest.
CorpusLoad load_corpus(const std::filesystem::path& dir);

}  // namespace mapcap::ingest

#endif  // MAPCAP_INGEST_HPP_
