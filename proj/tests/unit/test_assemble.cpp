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
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcap/assemble.hpp"
#include "mapcap/errors.hpp"
#include "test_support.hpp"

using namespace mapcap;
using namespace mapcap::assemble;

namespace {

// Saves and restores one environment variable around a test body.
class EnvGuard {
 public:
  explicit EnvGuard(const char* name) : name_(name) {
    if (const char* v = std::getenv(name)) saved_ = v;
  }
  ~EnvGuard() {
    if (saved_.has_value()) {
      setenv(name_, saved_->c_str(), 1);
    } else {
      unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> saved_;
};

ingest::SampleRecord make_sample(const std::string& id,
                                 const std::string& image_path) {
  ingest::SampleRecord s;
  s.id = id;
  s.category = "port";
  s.point = {45.76, 4.83};
  s.gsd = 0.5;
  s.timestamp = "2015-04-12T09:26:01Z";
  s.timestamp_epoch_s = 1428830761;
  s.img_width_px = 2000;
  s.img_height_px = 2000;
  s.city = "Lyon";
  s.country = "France";
  s.image_path = image_path;
  s.footprint = {45.7596, 4.8255, 45.7604, 4.8345};
  return s;
}

AuditRecord make_audit(const std::string& id) {
  AuditRecord a;
  a.sample_id = id;
  a.fdr.fdr = 0.5;
  a.fdr.k = 2;
  a.fdr.hits = 1;
  a.fdr.misses = {{"Hudson River", 10, 22, "hudson river"}};
  a.fdr.vacuous = false;
  a.fdr.mode = metrics::MatchMode::Exact;
  a.uncertainty.uncertain_pct = 20.0;
  a.uncertainty.hedge_hits = 1;
  a.uncertainty.total_tokens = 5;
  a.uncertainty.lexicon_id = "lex-1";
  a.uncertainty.vacuous = false;
  return a;
}

// Builds a fully valid tuple whose referenced files live under dir.
DatasetTuple make_tuple(const testsupport::TempDir& dir,
                        const std::string& id) {
  const auto image = dir / (id + "_image.png");
  const auto tile = dir / (id + "_tile.png");
  testsupport::write_file(image, "img");
  testsupport::write_file(tile, "tile");

  geo::MapRequestSpec spec;
  spec.center = {45.76, 4.83};
  spec.zoom = 17;
  spec.resolution_px = 1024;
  spec.style = {MapStyleVariant::LandmarksOnly, "landmarks-only"};
  spec.endpoint_template = "https://maps.test/{style}/{lon},{lat},{zoom}";
  spec.url = "https://maps.test/landmarks-only/4.830000,45.760000,17";

  llm::CaptionBundle bundle;
  bundle.sample_id = id;
  bundle.raw_responses = {"Central Park is here."};
  bundle.final_caption = "Central Park is here.";
  bundle.model_id = "mock-vlm-1";

  osmref::ReferenceList refs;
  refs.entries = {"central park", "france", "lyon"};
  refs.provenance = {{"central park", "tag:name@node/1001"},
                     {"france", "metadata:country"},
                     {"lyon", "metadata:city"}};

  Provenance prov;
  prov.config_hash = "cfg-hash";
  prov.created_at = "1970-01-02T00:00:00Z";

  return assemble_tuple(make_sample(id, image.string()), spec, tile.string(),
                        bundle, refs, make_audit(id), prov);
}

}  // namespace

TEST_CASE("timestamps honor the reproducible-build epoch variable") {
  EnvGuard guard("SOURCE_DATE_EPOCH");
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  CHECK(created_at_now() == "1970-01-02T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "1428830761", 1);
  CHECK(created_at_now() == "2015-04-12T09:26:01Z");
  unsetenv("SOURCE_DATE_EPOCH");
  const auto now = created_at_now();
  CHECK(now.size() == 20);
  CHECK(now.back() == 'Z');
}

TEST_CASE("audit records serialize flat and round trip") {
  const auto audit = make_audit("s1");
  const nlohmann::json j = audit;
  CHECK(j.at("sample_id") == "s1");
  CHECK(j.at("fdr") == 0.5);
  CHECK(j.at("k") == 2);
  CHECK(j.at("hits") == 1);
  CHECK(j.at("vacuous") == false);
  CHECK(j.at("uncertain_pct") == 20.0);
  CHECK(j.at("hedge_hits") == 1);
  CHECK(j.at("total_tokens") == 5);
  CHECK(j.at("lexicon_id") == "lex-1");
  CHECK(j.at("uncertainty_vacuous") == false);
  REQUIRE(j.at("misses").size() == 1);

  const auto back = j.get<AuditRecord>();
  CHECK(nlohmann::json(back) == j);
  CHECK(back.uncertainty.uncertain_pct == 20.0);
  CHECK(back.fdr.misses[0].text == "Hudson River");
}

TEST_CASE("tuple assembly validates ids and file presence") {
  testsupport::TempDir tmp;
  const auto tuple = make_tuple(tmp, "s1");
  CHECK(tuple.sample.id == "s1");
  CHECK(tuple.bundle.final_caption == "Central Park is here.");
  CHECK(tuple.provenance.pipeline_version == kPipelineVersion);

  const auto image = tmp / "x_image.png";
  const auto tile = tmp / "x_tile.png";
  testsupport::write_file(image, "img");
  testsupport::write_file(tile, "tile");
  const auto sample = make_sample("x", image.string());

  auto bundle = tuple.bundle;
  bundle.sample_id = "someone_else";
  CHECK_THROWS_AS(assemble_tuple(sample, tuple.map_spec, tile.string(), bundle,
                                 tuple.refs, make_audit("x"),
                                 tuple.provenance),
                  MismatchError);

  bundle.sample_id = "x";
  CHECK_THROWS_AS(assemble_tuple(sample, tuple.map_spec, tile.string(), bundle,
                                 tuple.refs, make_audit("other"),
                                 tuple.provenance),
                  MismatchError);

  std::filesystem::remove(tile);
  CHECK_THROWS_AS(assemble_tuple(sample, tuple.map_spec, tile.string(), bundle,
                                 tuple.refs, make_audit("x"),
                                 tuple.provenance),
                  MissingFileError);
}

TEST_CASE("manifests sort rows, round trip, and rewrite identically") {
  testsupport::TempDir tmp;
  Manifest m;
  m.header.config_hash = "cfg-hash";
  m.rows.push_back(make_tuple(tmp, "s2"));
  m.rows.push_back(make_tuple(tmp, "s1"));

  const auto path = (tmp / "manifest.jsonl").string();
  write_manifest(m, path);
  const auto text = testsupport::read_file(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  const auto loaded = read_manifest(path);
  CHECK(loaded.header.schema_version == kManifestSchemaVersion);
  CHECK(loaded.header.config_hash == "cfg-hash");
  CHECK(loaded.header.count == 2);
  REQUIRE(loaded.rows.size() == 2);
  CHECK(loaded.rows[0].sample.id == "s1");
  CHECK(loaded.rows[1].sample.id == "s2");

  const auto again = (tmp / "again.jsonl").string();
  write_manifest(loaded, again);
  CHECK(testsupport::read_file(again) == text);
}

TEST_CASE("manifest parsing rejects damaged files") {
  testsupport::TempDir tmp;
  Manifest m;
  m.header.config_hash = "h";
  m.rows.push_back(make_tuple(tmp, "s1"));
  const auto path = (tmp / "manifest.jsonl").string();
  write_manifest(m, path);
  const auto text = testsupport::read_file(path);
  const auto newline = text.find('\n');
  const auto header_line = text.substr(0, newline);
  const auto row_line = text.substr(newline + 1);

  auto header = nlohmann::json::parse(header_line);

  SUBCASE("unknown schema version") {
    header["schema_version"] = 999;
    testsupport::write_file(tmp / "bad.jsonl", header.dump() + "\n");
    CHECK_THROWS_AS(read_manifest((tmp / "bad.jsonl").string()), SchemaError);
  }
  SUBCASE("duplicate row ids") {
    header["count"] = 2;
    testsupport::write_file(tmp / "bad.jsonl",
                            header.dump() + "\n" + row_line + row_line);
    CHECK_THROWS_AS(read_manifest((tmp / "bad.jsonl").string()), SchemaError);
  }
  SUBCASE("header count disagrees with the rows") {
    header["count"] = 5;
    testsupport::write_file(tmp / "bad.jsonl", header.dump() + "\n" + row_line);
    CHECK_THROWS_AS(read_manifest((tmp / "bad.jsonl").string()), SchemaError);
  }
  SUBCASE("empty file") {
    testsupport::write_file(tmp / "bad.jsonl", "");
    CHECK_THROWS_AS(read_manifest((tmp / "bad.jsonl").string()), SchemaError);
  }
}

TEST_CASE("the resume plan lists missing samples in corpus order") {
  testsupport::TempDir tmp;
  Manifest m;
  m.rows.push_back(make_tuple(tmp, "a"));
  m.rows.push_back(make_tuple(tmp, "c"));

  std::vector<ingest::SampleRecord> corpus;
  for (const char* id : {"c", "b", "a", "d"}) {
    const auto img = tmp / (std::string(id) + ".png");
    testsupport::write_file(img, "x");
    corpus.push_back(make_sample(id, img.string()));
  }
  CHECK(resume_plan(m, corpus) == std::vector<std::string>{"b", "d"});
  CHECK(resume_plan(Manifest{}, {}).empty());
  Manifest empty;
  CHECK(resume_plan(empty, corpus) ==
        std::vector<std::string>{"c", "b", "a", "d"});
}
