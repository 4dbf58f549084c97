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

#include <set>
#include <string>

#include <json.hpp>

#include "mapcap/errors.hpp"
#include "mapcap/ingest.hpp"
#include "test_support.hpp"

using namespace mapcap;
using namespace mapcap::ingest;

namespace {

nlohmann::json minimal_doc() {
  return nlohmann::json{{"id", "t1"},          {"category", "stadium"},
                        {"lat", 0.0},          {"lon", 0.0},
                        {"gsd", 1.0},          {"img_width_px", 100},
                        {"img_height_px", 100}, {"image_path", "img/t1.png"},
                        {"timestamp", "2015-04-12T09:26:01Z"}};
}

}  // namespace

TEST_CASE("parse_metadata derives the footprint from point, gsd and dims") {
  const auto r = parse_metadata(minimal_doc().dump());
  CHECK(r.id == "t1");
  CHECK(r.category == "stadium");
  CHECK_FALSE(r.footprint_explicit);
  const double half = 50.0 / geo::kMetersPerDegree;
  CHECK(r.footprint.north == doctest::Approx(half).epsilon(1e-12));
  CHECK(r.footprint.south == doctest::Approx(-half).epsilon(1e-12));
  CHECK(r.footprint.east == doctest::Approx(half).epsilon(1e-12));
  CHECK_FALSE(r.city.has_value());
}

TEST_CASE("an explicit footprint wins over derivation") {
  auto doc = minimal_doc();
  doc["footprint"] = {{"south", -0.2}, {"west", -0.3}, {"north", 0.2},
                      {"east", 0.3}};
  const auto r = parse_metadata(doc.dump());
  CHECK(r.footprint_explicit);
  CHECK(r.footprint.east == 0.3);
}

TEST_CASE("missing and invalid fields name the offender") {
  auto no_gsd = minimal_doc();
  no_gsd.erase("gsd");
  CHECK_THROWS_WITH_AS(parse_metadata(no_gsd.dump()),
                       doctest::Contains("gsd"), ValidationError);

  auto bad_gsd = minimal_doc();
  bad_gsd["gsd"] = -1.0;
  CHECK_THROWS_AS(parse_metadata(bad_gsd.dump()), ValidationError);

  auto bad_lat = minimal_doc();
  bad_lat["lat"] = 89.0;  // outside the Mercator range
  CHECK_THROWS_AS(parse_metadata(bad_lat.dump()), ValidationError);

  CHECK_THROWS_AS(parse_metadata("{ not json"), ParseError);
}

TEST_CASE("timestamps normalize to UTC") {
  CHECK(parse_rfc3339_epoch("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_rfc3339_epoch("1970-01-01T02:00:00+02:00") == 0);
  CHECK(parse_rfc3339_epoch("2015-04-12T09:26:01Z") == 1428830761);
  CHECK_THROWS_AS(parse_rfc3339_epoch("last tuesday"), ValidationError);
  CHECK(format_utc(1428830761) == "2015-04-12T09:26:01Z");
  CHECK(format_utc(0) == "1970-01-01T00:00:00Z");

  auto doc = minimal_doc();
  doc["timestamp"] = "2015-04-12T11:26:01+02:00";
  const auto r = parse_metadata(doc.dump());
  CHECK(r.timestamp_epoch_s == 1428830761);
  CHECK(r.timestamp == "2015-04-12T09:26:01Z");

  // Timezone-less inputs are read as UTC rather than rejected.
  doc["timestamp"] = "2015-04-12T09:26:01";
  CHECK(parse_metadata(doc.dump()).timestamp_epoch_s == 1428830761);
}

TEST_CASE("fixture corpus loads ten unique samples in filename order") {
  const auto load = load_corpus(testsupport::fixtures_dir() / "corpus");
  REQUIRE(load.records.size() == 10);
  CHECK(load.skips.empty());
  std::set<std::string> ids;
  for (const auto& r : load.records) {
    ids.insert(r.id);
    CHECK_FALSE(r.category.empty());
    CHECK(r.gsd > 0);
  }
  CHECK(ids.size() == 10);
  CHECK(load.records.front().id == "lyon_0001");
  CHECK(load.records.back().id == "lyon_0010");

  const auto again = load_corpus(testsupport::fixtures_dir() / "corpus");
  for (std::size_t i = 0; i < load.records.size(); ++i) {
    CHECK(load.records[i].id == again.records[i].id);
  }
}

TEST_CASE("per-file failures become skips, not fatal errors") {
  const auto load = load_corpus(testsupport::fixtures_dir() / "corpus_bad");
  CHECK(load.records.size() == 1);
  CHECK(load.records[0].id == "ok_0001");
  REQUIRE(load.skips.size() == 1);
  CHECK(load.skips[0].file.find("zz_broken") != std::string::npos);
  CHECK_FALSE(load.skips[0].reason.empty());
}

TEST_CASE("an empty directory yields an empty corpus") {
  testsupport::TempDir tmp;
  const auto load = load_corpus(tmp.path());
  CHECK(load.records.empty());
  CHECK(load.skips.empty());
}

TEST_CASE("a missing directory is fatal") {
  testsupport::TempDir tmp;
  CHECK_THROWS_AS(load_corpus(tmp.path() / "nope"), IoError);
}

TEST_CASE("duplicate ids keep the first occurrence") {
  testsupport::TempDir tmp;
  auto a = minimal_doc();
  a["id"] = "dup";
  a["category"] = "port";
  auto b = minimal_doc();
  b["id"] = "dup";
  b["category"] = "stadium";
  testsupport::write_file(tmp / "a.meta.json", a.dump());
  testsupport::write_file(tmp / "b.meta.json", b.dump());
  const auto load = load_corpus(tmp.path());
  REQUIRE(load.records.size() == 1);
  CHECK(load.records[0].category == "port");
  REQUIRE(load.skips.size() == 1);
  CHECK(load.skips[0].file.find("b.meta.json") != std::string::npos);
}

TEST_CASE("sample records round trip through json") {
  const auto load = load_corpus(testsupport::fixtures_dir() / "corpus");
  REQUIRE_FALSE(load.records.empty());
  const auto& r = load.records.front();
  nlohmann::json j = r;
  const SampleRecord back = j;
  CHECK(back.id == r.id);
  CHECK(back.point.lat == r.point.lat);
  CHECK(back.footprint.south == r.footprint.south);
  CHECK(back.city == r.city);
  CHECK(back.timestamp_epoch_s == r.timestamp_epoch_s);
  CHECK(back.image_path == r.image_path);
}
