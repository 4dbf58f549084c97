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

#ifndef MAPCAP_ASSEMBLE_HPP_
#define MAPCAP_ASSEMBLE_HPP_

// Dataset tuple assembly and the line-delimited manifest that persists it.
//
// A tuple bundles everything the pipeline produced for one sample: the
// source record, the rendered map, the caption bundle, the reference list
// and the audit metrics. The manifest is one header line plus one JSON row
// per tuple, sorted by sample id so repeated writes are byte-identical.

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcap/geo.hpp"
#include "mapcap/ingest.hpp"
#include "mapcap/llm.hpp"
#include "mapcap/metrics.hpp"
#include "mapcap/osmref.hpp"

namespace mapcap::assemble {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kPipelineVersion = "1.0.0";

// Run provenance stamped into every manifest row.
struct Provenance {
  std::string pipeline_version = kPipelineVersion;
  std::string config_hash;
  std::string created_at;  // RFC 3339 UTC
};

void to_json(nlohmann::json& j, const Provenance& p);
void from_json(const nlohmann::json& j, Provenance& p);

// Current UTC timestamp; honors SOURCE_DATE_EPOCH for reproducible output.
std::string created_at_now();

// Caption quality metrics for one sample. Serialized flat: the name-match
// fields at top level next to the hedge fields, with the hedge vacuous flag
// stored as "uncertainty_vacuous" to keep both.
struct AuditRecord {
  std::string sample_id;
  metrics::FdrReport fdr;
  metrics::UncertaintyReport uncertainty;
};

void to_json(nlohmann::json& j, const AuditRecord& a);
void from_json(const nlohmann::json& j, AuditRecord& a);

// One complete dataset row: sample, map, references, caption, audit.
struct DatasetTuple {
  ingest::SampleRecord sample;
  std::string map_path;
  geo::MapRequestSpec map_spec;
  llm::CaptionBundle bundle;
  osmref::ReferenceList refs;
  AuditRecord audit;
  Provenance provenance;
};

void to_json(nlohmann::json& j, const DatasetTuple& t);
void from_json(const nlohmann::json& j, DatasetTuple& t);

struct ManifestHeader {
  int schema_version = kManifestSchemaVersion;
  std::string config_hash;
  std::size_t count = 0;
};

void to_json(nlohmann::json& j, const ManifestHeader& h);
void from_json(const nlohmann::json& j, ManifestHeader& h);

struct Manifest {
  ManifestHeader header;
  std::vector<DatasetTuple> rows;
};

// Validates that every component describes the same sample and that the
// referenced image files still exist, then builds the tuple. MismatchError
// on id disagreement, MissingFileError on an absent file.
DatasetTuple assemble_tuple(const ingest::SampleRecord& sample,
                            const geo::MapRequestSpec& map_spec,
                            const std::string& map_path,
                            const llm::CaptionBundle& bundle,
                            const osmref::ReferenceList& refs,
                            const AuditRecord& audit,
                            const Provenance& provenance);

// Writes header + rows (sorted by sample id) as line-delimited JSON. The
// file appears complete or not at all.
void write_manifest(const Manifest& manifest, const std::string& path);

// Parses a manifest file. SchemaError on version mismatch, duplicate row
// ids, or a header count that disagrees with the rows present.
Manifest read_manifest(const std::string& path);

// Sample ids present in the corpus but absent from the manifest, in corpus
// order. Drives resumable runs.
std::vector<std::string> resume_plan(
    const Manifest& manifest, const std::vector<ingest::SampleRecord>& corpus);

}  // namespace mapcap::assemble

#endif  // MAPCAP_ASSEMBLE_HPP_
