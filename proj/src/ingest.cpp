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

#include "mapcap/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "mapcap/errors.hpp"
#include "mapcap/jsonio.hpp"
#include "mapcap/log.hpp"

namespace mapcap::ingest {

namespace {

// Civil-date arithmetic; proleptic Gregorian, epoch 1970-01-01.
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int64_t* y, unsigned* m, unsigned* d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  *d = doy - (153 * mp + 2) / 5 + 1;
  *m = mp + (mp < 10 ? 3 : -9);
  *y = yr + (*m <= 2);
}

bool is_leap(int64_t y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int64_t y, unsigned m) {
  static const unsigned kDays[] = {31, 28, 31, 30, 31, 30,
                                   31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

int parse_fixed_digits(const std::string& s, std::size_t pos, int width) {
  int value = 0;
  for (int i = 0; i < width; ++i) {
    const std::size_t at = pos + i;
    if (at >= s.size() || !std::isdigit(static_cast<unsigned char>(s[at]))) {
      return -1;
    }
    value = value * 10 + (s[at] - '0');
  }
  return value;
}


const nlohmann::json& require_field(const nlohmann::json& j,
                                    const std::string& key) {
  if (!j.contains(key)) {
    throw ValidationError(key, "required field missing");
  }
  return j.at(key);
}

std::string require_string(const nlohmann::json& j, const std::string& key) {
  const auto& v = require_field(j, key);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw ValidationError(key, "expected a non-empty string");
  }
  return v.get<std::string>();
}

double require_number(const nlohmann::json& j, const std::string& key) {
  const auto& v = require_field(j, key);
  if (!v.is_number()) {
    throw ValidationError(key, "expected a number");
  }
  return v.get<double>();
}

int require_positive_int(const nlohmann::json& j, const std::string& key) {
  const auto& v = require_field(j, key);
  if (!v.is_number_integer() || v.get<int64_t>() <= 0 ||
      v.get<int64_t>() > INT32_MAX) {
    throw ValidationError(key, "expected a positive integer");
  }
  return static_cast<int>(v.get<int64_t>());
}

std::optional<std::string> optional_string(const nlohmann::json& j,
                                           const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) {
    throw ValidationError(key, "expected a string");
  }
  auto s = j.at(key).get<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

std::string format_utc(int64_t epoch_s) {
  int64_t days = epoch_s / 86400;
  int64_t rem = epoch_s % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int64_t y;
  unsigned m, d;
  civil_from_days(days, &y, &m, &d);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

int64_t parse_rfc3339_epoch(const std::string& text) {
  // YYYY-MM-DDTHH:MM:SS[.frac][Z|+HH:MM|-HH:MM]; missing designator = UTC.
  const auto fail = [&](const char* why) -> int64_t {
    throw ValidationError("timestamp",
                          std::string(why) + ": \"" + text + "\"");
  };
  if (text.size() < 19) return fail("timestamp too short");
  const int year = parse_fixed_digits(text, 0, 4);
  const int month = parse_fixed_digits(text, 5, 2);
  const int day = parse_fixed_digits(text, 8, 2);
  const int hour = parse_fixed_digits(text, 11, 2);
  const int minute = parse_fixed_digits(text, 14, 2);
  const int second = parse_fixed_digits(text, 17, 2);
  if (year < 0 || month < 0 || day < 0 || hour < 0 || minute < 0 ||
      second < 0 || text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return fail("malformed timestamp");
  }
  if (month < 1 || month > 12) return fail("month out of range");
  if (day < 1 ||
      static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month))) {
    return fail("day out of range");
  }
  if (hour > 23 || minute > 59 || second > 60) return fail("time out of range");

  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    if (pos == start) return fail("empty fractional seconds");
  }

  int64_t offset_s = 0;
  if (pos < text.size()) {
    const char c = text[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      const int oh = parse_fixed_digits(text, pos + 1, 2);
      const int om = parse_fixed_digits(text, pos + 4, 2);
      if (oh < 0 || om < 0 || pos + 3 >= text.size() || text[pos + 3] != ':' ||
          oh > 23 || om > 59) {
        return fail("malformed UTC offset");
      }
      offset_s = (oh * 3600 + om * 60) * (c == '+' ? 1 : -1);
      pos += 6;
    } else {
      return fail("trailing characters");
    }
  }
  if (pos != text.size()) return fail("trailing characters");

  const int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                       static_cast<unsigned>(day));
  return days * 86400 + hour * 3600 + minute * 60 + second - offset_s;
}

void to_json(nlohmann::json& j, const SampleRecord& r) {
  j = nlohmann::json{{"id", r.id},
                     {"category", r.category},
                     {"lat", r.point.lat},
                     {"lon", r.point.lon},
                     {"gsd", r.gsd},
                     {"timestamp", r.timestamp},
                     {"img_width_px", r.img_width_px},
                     {"img_height_px", r.img_height_px},
                     {"image_path", r.image_path},
                     {"footprint",
                      {{"south", r.footprint.south},
                       {"west", r.footprint.west},
                       {"north", r.footprint.north},
                       {"east", r.footprint.east}}},
                     {"footprint_explicit", r.footprint_explicit}};
  if (r.city) j["city"] = *r.city;
  if (r.region) j["region"] = *r.region;
  if (r.country) j["country"] = *r.country;
}

void from_json(const nlohmann::json& j, SampleRecord& r) {
  r.id = j.at("id").get<std::string>();
  r.category = j.at("category").get<std::string>();
  r.point.lat = j.at("lat").get<double>();
  r.point.lon = j.at("lon").get<double>();
  r.gsd = j.at("gsd").get<double>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.timestamp_epoch_s = parse_rfc3339_epoch(r.timestamp);
  r.img_width_px = j.at("img_width_px").get<int>();
  r.img_height_px = j.at("img_height_px").get<int>();
  r.image_path = j.at("image_path").get<std::string>();
  const auto& f = j.at("footprint");
  r.footprint.south = f.at("south").get<double>();
  r.footprint.west = f.at("west").get<double>();
  r.footprint.north = f.at("north").get<double>();
  r.footprint.east = f.at("east").get<double>();
  r.footprint_explicit = j.value("footprint_explicit", false);
  r.city = std::nullopt;
  r.region = std::nullopt;
  r.country = std::nullopt;
  if (j.contains("city")) r.city = j.at("city").get<std::string>();
  if (j.contains("region")) r.region = j.at("region").get<std::string>();
  if (j.contains("country")) r.country = j.at("country").get<std::string>();
}

SampleRecord parse_metadata(std::string_view raw) {
  const nlohmann::json doc = jsonio::parse_json(raw, "metadata");
  if (!doc.is_object()) {
    throw ValidationError("document", "metadata root is not an object");
  }
  try {
    SampleRecord r;
    r.id = require_string(doc, "id");
    r.category = require_string(doc, "category");
    r.point.lat = require_number(doc, "lat");
    r.point.lon = require_number(doc, "lon");
    if (r.point.lat < -geo::kMaxMercatorLatDeg ||
        r.point.lat > geo::kMaxMercatorLatDeg) {
      throw ValidationError("lat", "latitude outside the Web-Mercator range");
    }
    if (r.point.lon < -180.0 || r.point.lon >= 180.0) {
      throw ValidationError("lon", "longitude outside [-180, 180)");
    }
    r.gsd = require_number(doc, "gsd");
    if (!(r.gsd > 0.0)) {
      throw ValidationError("gsd", "gsd must be positive");
    }
    const auto ts = require_string(doc, "timestamp");
    r.timestamp_epoch_s = parse_rfc3339_epoch(ts);
    r.timestamp = format_utc(r.timestamp_epoch_s);
    const bool has_designator =
        ts.size() > 19 &&
        (ts.back() == 'Z' || ts.back() == 'z' ||
         ts.find('+', 19) != std::string::npos ||
         ts.find('-', 19) != std::string::npos);
    if (!has_designator) {
      log::event("timestamp_assumed_utc", {{"id", r.id}, {"timestamp", ts}});
    }
    r.img_width_px = require_positive_int(doc, "img_width_px");
    r.img_height_px = require_positive_int(doc, "img_height_px");
    r.image_path = require_string(doc, "image_path");
    r.city = optional_string(doc, "city");
    r.region = optional_string(doc, "region");
    r.country = optional_string(doc, "country");
    if (doc.contains("footprint")) {
      const auto& f = doc.at("footprint");
      if (!f.is_object()) {
        throw ValidationError("footprint", "expected an object");
      }
      r.footprint.south = require_number(f, "south");
      r.footprint.west = require_number(f, "west");
      r.footprint.north = require_number(f, "north");
      r.footprint.east = require_number(f, "east");
      if (!geo::box_valid(r.footprint)) {
        throw ValidationError("footprint", "invalid bounding box");
      }
      r.footprint_explicit = true;
    } else {
      try {
        r.footprint = geo::derive_footprint(r.point, r.gsd, r.img_width_px,
                                            r.img_height_px);
      } catch (const DomainError& e) {
        throw ValidationError("footprint", e.what());
      }
      r.footprint_explicit = false;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    // Belt and braces so arbitrary documents cannot escape the error
    // contract via an unguarded access.
    throw ValidationError("document", e.what());
  }
}

CorpusLoad load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("not a readable directory: " + dir.string());
  }
  const std::string suffix = ".meta.json";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  if (ec) {
    throw IoError("cannot enumerate directory: " + dir.string());
  }
  // Lexicographic by filename: the ordering contract ignores how the
  // filesystem happens to enumerate.
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  CorpusLoad out;
  std::vector<std::string> seen_ids;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    try {
      const auto record = parse_metadata(jsonio::read_text_file(file));
      if (std::find(seen_ids.begin(), seen_ids.end(), record.id) !=
          seen_ids.end()) {
        out.skips.push_back({name, "duplicate id: " + record.id});
        log::event("ingest_skip",
                   {{"file", name}, {"reason", "duplicate id"}});
        continue;
      }
      seen_ids.push_back(record.id);
      out.records.push_back(record);
    } catch (const Error& e) {
      out.skips.push_back({name, e.what()});
      log::event("ingest_skip", {{"file", name}, {"reason", e.what()}});
    }
  }
  return out;
}

}  // namespace mapcap::ingest
