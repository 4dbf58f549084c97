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

#include "mapcap/assemble.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <set>
#include <sstream>
#include <utility>

#include "mapcap/errors.hpp"
#include "mapcap/jsonio.hpp"

namespace mapcap::assemble {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const Provenance& p) {
  j = json{{"pipeline_version", p.pipeline_version},
           {"config_hash", p.config_hash},
           {"created_at", p.created_at}};
}

void from_json(const json& j, Provenance& p) {
  j.at("pipeline_version").get_to(p.pipeline_version);
  j.at("config_hash").get_to(p.config_hash);
  j.at("created_at").get_to(p.created_at);
}

std::string created_at_now() {
  int64_t epoch = 0;
  bool have = false;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH");
      sde != nullptr && *sde != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(sde, &end, 10);
    if (end != nullptr && *end == '\0') {
      epoch = static_cast<int64_t>(v);
      have = true;
    }
  }
  if (!have) epoch = static_cast<int64_t>(std::time(nullptr));
  return ingest::format_utc(epoch);
}

void to_json(json& j, const AuditRecord& a) {
  j = a.fdr;
  json u = a.uncertainty;
  j["uncertainty_vacuous"] = u.at("vacuous");
  u.erase("vacuous");
  j.update(u);
  j["sample_id"] = a.sample_id;
}

void from_json(const json& j, AuditRecord& a) {
  j.at("sample_id").get_to(a.sample_id);
  a.fdr = j.get<metrics::FdrReport>();
  json u = j;
  u["vacuous"] = j.at("uncertainty_vacuous");
  a.uncertainty = u.get<metrics::UncertaintyReport>();
}

void to_json(json& j, const DatasetTuple& t) {
  j = json{{"sample", t.sample},       {"map_path", t.map_path},
           {"map_spec", t.map_spec},   {"bundle", t.bundle},
           {"refs", t.refs},           {"audit", t.audit},
           {"provenance", t.provenance}};
}

void from_json(const json& j, DatasetTuple& t) {
  j.at("sample").get_to(t.sample);
  j.at("map_path").get_to(t.map_path);
  j.at("map_spec").get_to(t.map_spec);
  j.at("bundle").get_to(t.bundle);
  j.at("refs").get_to(t.refs);
  j.at("audit").get_to(t.audit);
  j.at("provenance").get_to(t.provenance);
}

void to_json(json& j, const ManifestHeader& h) {
  j = json{{"schema_version", h.schema_version},
           {"config_hash", h.config_hash},
           {"count", h.count}};
}

void from_json(const json& j, ManifestHeader& h) {
  j.at("schema_version").get_to(h.schema_version);
  j.at("config_hash").get_to(h.config_hash);
  j.at("count").get_to(h.count);
}

DatasetTuple assemble_tuple(const ingest::SampleRecord& sample,
                            const geo::MapRequestSpec& map_spec,
                            const std::string& map_path,
                            const llm::CaptionBundle& bundle,
                            const osmref::ReferenceList& refs,
                            const AuditRecord& audit,
                            const Provenance& provenance) {
  if (bundle.sample_id != sample.id) {
    throw MismatchError("caption bundle is for '" + bundle.sample_id +
                        "', sample is '" + sample.id + "'");
  }
  if (audit.sample_id != sample.id) {
    throw MismatchError("audit is for '" + audit.sample_id + "', sample is '" +
                        sample.id + "'");
  }
  for (const std::string& p : {map_path, sample.image_path}) {
    if (!fs::exists(p)) {
      throw MissingFileError(p, "missing artifact for sample '" + sample.id +
                                    "': " + p);
    }
  }
  DatasetTuple t;
  t.sample = sample;
  t.map_path = map_path;
  t.map_spec = map_spec;
  t.bundle = bundle;
  t.refs = refs;
  t.audit = audit;
  t.provenance = provenance;
  return t;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  std::vector<const DatasetTuple*> sorted;
  sorted.reserve(manifest.rows.size());
  for (const DatasetTuple& t : manifest.rows) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const DatasetTuple* a, const DatasetTuple* b) {
              return a->sample.id < b->sample.id;
            });

  ManifestHeader header = manifest.header;
  header.count = sorted.size();

  std::ostringstream out;
  out << jsonio::canonical_dump(json(header)) << '\n';
  for (const DatasetTuple* t : sorted) {
    out << jsonio::canonical_dump(json(*t)) << '\n';
  }
  jsonio::write_text_atomic(path, out.str());
}

Manifest read_manifest(const std::string& path) {
  const std::string text = jsonio::read_text_file(path);
  Manifest m;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const json j =
        jsonio::parse_json(line, "manifest line " + std::to_string(line_no));
    if (line_no == 0) {
      m.header = j.get<ManifestHeader>();
      if (m.header.schema_version != kManifestSchemaVersion) {
        throw SchemaError("unsupported manifest schema_version " +
                          std::to_string(m.header.schema_version));
      }
    } else {
      DatasetTuple t = j.get<DatasetTuple>();
      if (!seen.insert(t.sample.id).second) {
        throw SchemaError("duplicate manifest row id '" + t.sample.id + "'");
      }
      m.rows.push_back(std::move(t));
    }
    ++line_no;
  }
  if (line_no == 0) throw SchemaError("manifest is empty: " + path);
  if (m.header.count != m.rows.size()) {
    throw SchemaError("manifest header count " +
                      std::to_string(m.header.count) + " != " +
                      std::to_string(m.rows.size()) + " rows");
  }
  return m;
}

std::vector<std::string> resume_plan(
    const Manifest& manifest,
    const std::vector<ingest::SampleRecord>& corpus) {
  std::set<std::string> done;
  for (const DatasetTuple& t : manifest.rows) done.insert(t.sample.id);
  std::vector<std::string> pending;
  for (const ingest::SampleRecord& s : corpus) {
    if (done.count(s.id) == 0) pending.push_back(s.id);
  }
  return pending;
}

}  // namespace mapcap::assemble
