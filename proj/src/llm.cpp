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

#include "mapcap/llm.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mapcap/detrng.hpp"
#include "mapcap/errors.hpp"
#include "mapcap/geo.hpp"
#include "mapcap/hashutil.hpp"
#include "mapcap/httputil.hpp"
#include "mapcap/jsonio.hpp"
#include "mapcap/log.hpp"
#include "mapcap/metrics.hpp"

namespace mapcap::llm {

namespace {

constexpr int kVariantCount = 5;

const char* kSystemText =
    "You are an expert analyst of overhead imagery. Answer with a single "
    "factual caption paragraph and nothing else.";

std::string humanize(const std::string& category) {
  std::string out = category;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string location_phrase(const ingest::SampleRecord& s) {
  std::vector<std::string> parts;
  if (s.city) parts.push_back(*s.city);
  if (s.region) parts.push_back(*s.region);
  if (s.country) parts.push_back(*s.country);
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

std::string gsd_string(double gsd) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", gsd);
  return buf;
}

std::string base64_encode(const std::string& bytes) {
  static const char kTable[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < bytes.size()) {
    const uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(kTable[(v >> 18) & 63]);
    out.push_back(kTable[(v >> 12) & 63]);
    out.push_back(kTable[(v >> 6) & 63]);
    out.push_back(kTable[v & 63]);
    i += 3;
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
    out.push_back(kTable[(v >> 18) & 63]);
    out.push_back(kTable[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out.push_back(kTable[(v >> 18) & 63]);
    out.push_back(kTable[(v >> 12) & 63]);
    out.push_back(kTable[(v >> 6) & 63]);
    out += "=";
  }
  return out;
}

// Sentence segmentation shared by the mock merge and the majority filter:
// segments end after . ! ? or at end of text.
std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (const char ch : text) {
    current.push_back(ch);
    if (ch == '.' || ch == '!' || ch == '?') {
      const auto first = current.find_first_not_of(" \t\n");
      if (first != std::string::npos) {
        out.push_back(current.substr(first));
      }
      current.clear();
    }
  }
  const auto first = current.find_first_not_of(" \t\n");
  if (first != std::string::npos) {
    const auto last = current.find_last_not_of(" \t\n");
    out.push_back(current.substr(first, last - first + 1));
  }
  return out;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += " ";
    out += s;
  }
  return out;
}

}  // namespace

std::string aggregation_name(Aggregation a) {
  return a == Aggregation::ConsolidateViaLlm ? "consolidate" : "majority";
}

Aggregation aggregation_from_name(const std::string& name) {
  if (name == "consolidate") return Aggregation::ConsolidateViaLlm;
  if (name == "majority") return Aggregation::MajorityNounFilter;
  throw ValidationError("aggregation", "unknown aggregation: " + name);
}

void to_json(nlohmann::json& j, const CaptionBundle& b) {
  j = nlohmann::json{{"sample_id", b.sample_id},
                     {"raw_responses", b.raw_responses},
                     {"final_caption", b.final_caption},
                     {"model_id", b.model_id},
                     {"request_hashes", b.request_hashes}};
}

void from_json(const nlohmann::json& j, CaptionBundle& b) {
  b.sample_id = j.at("sample_id").get<std::string>();
  b.raw_responses = j.at("raw_responses").get<std::vector<std::string>>();
  b.final_caption = j.at("final_caption").get<std::string>();
  b.model_id = j.at("model_id").get<std::string>();
  b.request_hashes = j.at("request_hashes").get<std::vector<std::string>>();
}

int prompt_variant_count() { return kVariantCount; }

PromptSpec build_prompt(const ingest::SampleRecord& sample,
                        const std::vector<std::string>& attachments,
                        int variant_index) {
  if (variant_index < 0 || variant_index >= kVariantCount) {
    throw DomainError("prompt variant index out of range: " +
                      std::to_string(variant_index));
  }
  const std::string cat = humanize(sample.category);
  const std::string loc = location_phrase(sample);
  const std::string lat = geo::format_coord(sample.point.lat);
  const std::string lon = geo::format_coord(sample.point.lon);
  const std::string gsd = gsd_string(sample.gsd);
  const std::string instruction =
      "describe the remote sensing scene and include landmarks, relative "
      "positions, sizes, colors, and quantities";

  std::ostringstream user;
  switch (variant_index) {
    case 0:
      user << "Please " << instruction << ". The image shows a " << cat << ".";
      if (!loc.empty()) user << " Location: " << loc << ".";
      user << " Coordinates: " << lat << ", " << lon
           << ". Ground sampling distance: " << gsd
           << " m/px. Use the attached map for context.";
      break;
    case 1:
      user << "This satellite image depicts a " << cat;
      if (!loc.empty()) user << " near " << loc;
      user << ". Coordinates " << lat << ", " << lon << "; GSD " << gsd
           << " m/px. Using the attached map for context, " << instruction
           << ".";
      break;
    case 2:
      user << "You are given a satellite photo and a reference map. Scene "
              "category: "
           << cat << ".";
      if (!loc.empty()) user << " Location: " << loc << ".";
      user << " Lat/lon: " << lat << ", " << lon << ". Resolution: " << gsd
           << " m/px. Now " << instruction << ".";
      break;
    case 3:
      user << "Caption this overhead scene; " << instruction
           << ". Metadata: category=" << cat;
      if (!loc.empty()) user << ", location=" << loc;
      user << ", lat=" << lat << ", lon=" << lon << ", gsd=" << gsd << ".";
      break;
    default:
      user << "Study the attached map, then " << instruction << ". A " << cat
           << " at " << lat << ", " << lon;
      if (!loc.empty()) user << " (" << loc << ")";
      user << "; ground sampling distance " << gsd << " m/px.";
      break;
  }

  PromptSpec spec;
  spec.sample_id = sample.id;
  spec.system_text = kSystemText;
  spec.user_text = user.str();
  spec.attachments = attachments;
  spec.variant_index = variant_index;
  return spec;
}

PromptSpec build_consolidation_prompt(const std::string& sample_id,
                                      const std::vector<std::string>& drafts) {
  if (drafts.empty()) {
    throw DomainError("consolidation needs at least one draft");
  }
  std::ostringstream user;
  user << "Merge the following " << drafts.size()
       << " draft captions of the same scene into one caption, keeping only "
          "facts consistent across drafts.";
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    user << "\n" << (i + 1) << ". " << drafts[i];
  }
  PromptSpec spec;
  spec.sample_id = sample_id;
  spec.system_text = kSystemText;
  spec.user_text = user.str();
  spec.variant_index = 0;
  spec.consolidation_inputs = drafts;
  return spec;
}

MockBackend::MockBackend(MockBackendConfig config)
    : config_(std::move(config)) {}

BackendCapabilities MockBackend::capabilities() const {
  return {true, config_.model_id};
}

std::string MockBackend::complete(const PromptSpec& prompt) {
  // Merge request: order-preserving sentence union over the drafts.
  if (!prompt.consolidation_inputs.empty()) {
    std::vector<std::string> merged;
    std::set<std::string> seen;
    for (const auto& draft : prompt.consolidation_inputs) {
      for (const auto& sentence : split_sentences(draft)) {
        if (seen.insert(sentence).second) merged.push_back(sentence);
      }
    }
    return join_sentences(merged);
  }

  // The map attachment's filename carries the style and resolution that
  // shape the hallucination rate.
  std::string style_slug = "all-labels";
  int resolution = 1024;
  for (const auto& att : prompt.attachments) {
    const std::string name = std::filesystem::path(att).filename().string();
    std::string id, slug;
    int res = 0;
    if (geo::parse_map_tile_filename(name, &id, &slug, &res)) {
      style_slug = slug;
      resolution = res;
      break;
    }
  }

  double p = config_.default_hallucination_p;
  if (const auto it = config_.per_resolution_p.find(resolution);
      it != config_.per_resolution_p.end()) {
    p = it->second;
  }
  if (const auto it = config_.per_style_multiplier.find(style_slug);
      it != config_.per_style_multiplier.end()) {
    p *= it->second;
  }
  p = std::clamp(p, 0.0, 1.0);

  // Content-derived seed: identical requests collide to identical captions,
  // independent of call order or worker interleaving.
  uint64_t seed = hashutil::fnv1a64(prompt.sample_id, config_.seed + 1);
  seed = hashutil::fnv1a64_mix(seed, static_cast<uint64_t>(prompt.variant_index));
  seed = hashutil::fnv1a64(style_slug, seed);
  seed = hashutil::fnv1a64_mix(seed, static_cast<uint64_t>(resolution));
  DetRng rng(seed);

  // Metadata sentence, phrased per prompt variant.
  std::string category = "scene";
  std::string loc;
  {
    // The prompt embeds "category=<cat>" (variant 3) or "a <cat>" phrases;
    // recover the category from the user text rather than guessing.
    const std::string& u = prompt.user_text;
    const auto cat_key = u.find("category=");
    if (cat_key != std::string::npos) {
      const auto end = u.find_first_of(",.", cat_key);
      category = u.substr(cat_key + 9, end - (cat_key + 9));
    } else if (const auto shows = u.find("shows a "); shows != std::string::npos) {
      const auto end = u.find('.', shows);
      category = u.substr(shows + 8, end - (shows + 8));
    } else if (const auto depicts = u.find("depicts a ");
               depicts != std::string::npos) {
      const auto end = u.find_first_of(".;", depicts);
      std::string seg = u.substr(depicts + 10, end - (depicts + 10));
      const auto near = seg.find(" near ");
      if (near != std::string::npos) seg = seg.substr(0, near);
      category = seg;
    } else if (const auto cat2 = u.find("category: "); cat2 != std::string::npos) {
      const auto end = u.find('.', cat2);
      category = u.substr(cat2 + 10, end - (cat2 + 10));
    } else if (const auto art = u.find(". A "); art != std::string::npos) {
      const auto at = u.find(" at ", art);
      if (at != std::string::npos) category = u.substr(art + 4, at - (art + 4));
    }
    const auto loc_key = u.find("Location: ");
    if (loc_key != std::string::npos) {
      const auto end = u.find('.', loc_key);
      loc = u.substr(loc_key + 10, end - (loc_key + 10));
    } else if (const auto near = u.find(" near "); near != std::string::npos) {
      const auto end = u.find_first_of(".;(", near);
      loc = u.substr(near + 6, end - (near + 6));
    } else if (const auto lk = u.find("location="); lk != std::string::npos) {
      const auto end = u.find(", lat=", lk);
      loc = u.substr(lk + 9, end - (lk + 9));
    } else if (const auto par = u.find(" ("); par != std::string::npos) {
      const auto end = u.find(')', par);
      loc = u.substr(par + 2, end - (par + 2));
    }
  }

  std::vector<std::string> sentences;
  {
    std::ostringstream s;
    switch (prompt.variant_index % kVariantCount) {
      case 0:
        if (!loc.empty()) {
          s << "The image shows a " << category << " near " << loc << ".";
        } else {
          s << "The image shows a " << category << " in open terrain.";
        }
        break;
      case 1:
        if (!loc.empty()) {
          s << "This scene depicts a " << category << " close to " << loc
            << ".";
        } else {
          s << "This scene depicts a " << category << ".";
        }
        break;
      case 2:
        if (!loc.empty()) {
          s << "Seen from above, this " << category << " lies within " << loc
            << ".";
        } else {
          s << "Seen from above, this " << category << " spans the frame.";
        }
        break;
      case 3:
        if (!loc.empty()) {
          s << "The area around " << loc << " contains a " << category << ".";
        } else {
          s << "The area contains a " << category << ".";
        }
        break;
      default:
        if (!loc.empty()) {
          s << "There is a " << category << " situated in " << loc << ".";
        } else {
          s << "There is a " << category << " situated in open terrain.";
        }
        break;
    }
    sentences.push_back(s.str());
  }

  // Map-derived names, filtered the way the requested style filters labels.
  const auto pick = [&rng](const std::vector<std::string>& pool,
                           std::size_t want) {
    std::vector<std::string> bag = pool;
    std::vector<std::string> out;
    const std::size_t n = std::min(want, bag.size());
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t at = rng.index(bag.size());
      out.push_back(bag[at]);
      bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(at));
    }
    return out;
  };
  const bool landmarks_on =
      style_slug == "landmarks-only" || style_slug == "all-labels";
  const bool streets_on =
      style_slug == "streets-only" || style_slug == "all-labels";
  if (landmarks_on && !config_.landmark_names.empty()) {
    const auto names = pick(config_.landmark_names, 2);
    std::ostringstream s;
    if (names.size() == 1) {
      s << "Visible on the map is " << names[0] << ".";
    } else {
      s << "Visible on the map are " << names[0] << " and " << names[1] << ".";
    }
    sentences.push_back(s.str());
  }
  if (streets_on && !config_.street_names.empty()) {
    const auto names = pick(config_.street_names, 2);
    std::ostringstream s;
    if (names.size() == 1) {
      s << "Visible streets include " << names[0] << ".";
    } else {
      s << "Visible streets include " << names[0] << " and " << names[1]
        << ".";
    }
    sentences.push_back(s.str());
  }

  // Fabricated names, one slot at a time, each hedged differently.
  if (!config_.fake_names.empty()) {
    for (int slot = 0; slot < 3; ++slot) {
      const double u = rng.uniform01();
      const std::string fake =
          config_.fake_names[rng.index(config_.fake_names.size())];
      if (u >= p) continue;
      std::ostringstream s;
      switch (slot) {
        case 0: s << "There is possibly " << fake << " nearby."; break;
        case 1: s << "It appears that " << fake << " lies to the north."; break;
        default: s << "Perhaps " << fake << " borders the site."; break;
      }
      sentences.push_back(s.str());
    }
  }

  sentences.push_back("The layout is arranged in a regular pattern.");
  return join_sentences(sentences);
}

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)) {}

BackendCapabilities HttpBackend::capabilities() const {
  return {true, config_.model_id};
}

std::string HttpBackend::complete(const PromptSpec& prompt) {
  nlohmann::json user_content = nlohmann::json::array();
  user_content.push_back({{"type", "text"}, {"text", prompt.user_text}});
  for (const auto& att : prompt.attachments) {
    std::ifstream in(att, std::ios::binary);
    if (!in) {
      throw IoError("attachment unreadable: " + att);
    }
    std::ostringstream bytes;
    bytes << in.rdbuf();
    user_content.push_back(
        {{"type", "image_url"},
         {"image_url",
          {{"url", "data:image/png;base64," + base64_encode(bytes.str())}}}});
  }
  nlohmann::json body = {
      {"model", config_.model_id},
      {"messages",
       nlohmann::json::array(
           {{{"role", "system"}, {"content", prompt.system_text}},
            {{"role", "user"}, {"content", user_content}}})}};
  if (config_.params.is_object()) {
    for (const auto& [k, v] : config_.params.items()) body[k] = v;
  }

  const auto url = httputil::split_url(config_.endpoint);
  httplib::Client client(url.base);
  client.set_read_timeout(config_.timeout_s, 0);
  client.set_connection_timeout(10, 0);
  httplib::Headers headers;
  if (!config_.auth_env.empty()) {
    const char* token = std::getenv(config_.auth_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw BackendError(
          "auth environment variable not set: " + config_.auth_env,
          /*retryable=*/false);
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendError("transport failure contacting " + url.base,
                       /*retryable=*/true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("backend HTTP " + std::to_string(res->status),
                       httputil::retryable_status(res->status), res->status);
  }
  try {
    const auto parsed = nlohmann::json::parse(res->body);
    return parsed.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed backend response: ") + e.what(),
                       /*retryable=*/false);
  }
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string Cache::key_for(const PromptSpec& prompt,
                           const std::string& model_id) const {
  nlohmann::json attachments = nlohmann::json::array();
  for (const auto& att : prompt.attachments) {
    const std::filesystem::path p(att);
    nlohmann::json entry = {{"name", p.filename().string()}};
    std::error_code ec;
    if (std::filesystem::is_regular_file(p, ec)) {
      entry["sha256"] = hashutil::sha256_file(p);
    } else {
      entry["path"] = att;
    }
    attachments.push_back(entry);
  }
  const nlohmann::json canonical = {
      {"model_id", model_id},
      {"sample_id", prompt.sample_id},
      {"system", prompt.system_text},
      {"user", prompt.user_text},
      {"variant", prompt.variant_index},
      {"attachments", attachments},
      {"consolidation_inputs", prompt.consolidation_inputs}};
  return hashutil::sha256_hex(jsonio::canonical_dump(canonical));
}

std::optional<std::string> Cache::lookup(const std::string& key) const {
  const auto path = dir_ / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  try {
    const auto doc = jsonio::read_json_file(path);
    return doc.at("response").get<std::string>();
  } catch (const std::exception& e) {
    log::event("cache_corrupt_entry", {{"key", key}, {"error", e.what()}});
    return std::nullopt;
  }
}

void Cache::store(const std::string& key,
                  const nlohmann::json& request_summary,
                  const std::string& response, int attempts) const {
  const nlohmann::json doc = {{"key", key},
                              {"request", request_summary},
                              {"response", response},
                              {"attempts", attempts}};
  jsonio::write_text_atomic(dir_ / (key + ".json"),
                            jsonio::canonical_dump(doc) + "\n");
}

void RequestBudget::charge() {
  const int64_t n = used_.fetch_add(1) + 1;
  if (n > limit_) {
    used_.fetch_sub(1);
    throw BudgetError("request budget exhausted (limit " +
                      std::to_string(limit_) + ")");
  }
}

std::string generate(const PromptSpec& prompt, GenerateContext& ctx) {
  if (ctx.backend == nullptr) {
    throw DomainError("generate requires a backend");
  }
  const std::string model_id = ctx.backend->capabilities().model_id;
  std::string key;
  if (ctx.cache != nullptr) {
    key = ctx.cache->key_for(prompt, model_id);
    if (const auto hit = ctx.cache->lookup(key)) {
      log::event("cache_hit", {{"key", key}, {"sample_id", prompt.sample_id}});
      return *hit;
    }
  }
  // One logical call, however many attempts it takes.
  if (ctx.budget != nullptr) ctx.budget->charge();

  std::string response;
  const uint64_t jitter_seed =
      hashutil::fnv1a64(key.empty() ? prompt.user_text : key,
                        ctx.seed ^ 0x72616e646f6dULL);
  const int attempts = retry::run_with_retry(
      [&] {
        if (ctx.limiter != nullptr) ctx.limiter->acquire();
        ctx.physical_calls.fetch_add(1);
        response = ctx.backend->complete(prompt);
      },
      ctx.retry, jitter_seed, "llm:" + prompt.sample_id);

  if (response.empty()) {
    throw BackendError("backend returned an empty caption",
                       /*retryable=*/false);
  }
  if (ctx.cache != nullptr) {
    const nlohmann::json summary = {
        {"sample_id", prompt.sample_id},
        {"model_id", model_id},
        {"variant", prompt.variant_index},
        {"user", prompt.user_text},
        {"attachments", prompt.attachments},
        {"consolidation_inputs", prompt.consolidation_inputs}};
    ctx.cache->store(key, summary, response, attempts);
  }
  return response;
}

CaptionBundle ensemble(const ingest::SampleRecord& sample,
                       const std::vector<std::string>& attachments,
                       const EnsembleConfig& cfg, GenerateContext& ctx) {
  if (cfg.n_prompts != 1 && cfg.n_prompts != 3 && cfg.n_prompts != 5) {
    throw DomainError("ensemble size must be 1, 3 or 5");
  }
  CaptionBundle bundle;
  bundle.sample_id = sample.id;
  bundle.model_id = ctx.backend->capabilities().model_id;
  bundle.raw_responses.assign(cfg.n_prompts, "");

  int successes = 0;
  for (int v = 0; v < cfg.n_prompts; ++v) {
    const PromptSpec prompt = build_prompt(sample, attachments, v);
    if (ctx.cache != nullptr) {
      bundle.request_hashes.push_back(
          ctx.cache->key_for(prompt, bundle.model_id));
    }
    try {
      bundle.raw_responses[v] = generate(prompt, ctx);
      ++successes;
    } catch (const BudgetError&) {
      throw;  // an exhausted budget aborts the run, it is not a lost vote
    } catch (const BackendError& e) {
      log::event("ensemble_member_failed",
                 {{"sample_id", sample.id}, {"variant", v}, {"error", e.what()}});
    }
  }
  const int quorum = (cfg.n_prompts + 1) / 2;
  if (successes < quorum) {
    throw EnsembleError("only " + std::to_string(successes) + " of " +
                        std::to_string(cfg.n_prompts) +
                        " ensemble responses succeeded");
  }

  if (cfg.n_prompts == 1) {
    bundle.final_caption = bundle.raw_responses[0];
    return bundle;
  }

  if (cfg.aggregation == Aggregation::ConsolidateViaLlm) {
    std::vector<std::string> drafts;
    for (const auto& r : bundle.raw_responses) {
      if (!r.empty()) drafts.push_back(r);
    }
    const PromptSpec merge = build_consolidation_prompt(sample.id, drafts);
    if (ctx.cache != nullptr) {
      bundle.request_hashes.push_back(
          ctx.cache->key_for(merge, bundle.model_id));
    }
    bundle.final_caption = generate(merge, ctx);
    return bundle;
  }

  // MajorityNounFilter: keep the response that agrees most with the nouns a
  // majority of responses mention, then drop its outlier sentences.
  std::vector<std::set<std::string>> nouns(bundle.raw_responses.size());
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < bundle.raw_responses.size(); ++i) {
    if (bundle.raw_responses[i].empty()) continue;
    for (const auto& cand :
         metrics::extract_proper_nouns(bundle.raw_responses[i]).entries) {
      if (nouns[i].insert(cand.normalized).second) ++counts[cand.normalized];
    }
  }
  std::set<std::string> majority;
  for (const auto& [noun, count] : counts) {
    if (count >= quorum) majority.insert(noun);
  }
  int best = -1;
  std::size_t best_overlap = 0;
  for (std::size_t i = 0; i < bundle.raw_responses.size(); ++i) {
    if (bundle.raw_responses[i].empty()) continue;
    std::size_t overlap = 0;
    for (const auto& n : nouns[i]) {
      if (majority.count(n)) ++overlap;
    }
    if (best < 0 || overlap > best_overlap) {
      best = static_cast<int>(i);
      best_overlap = overlap;
    }
  }
  const std::string& chosen = bundle.raw_responses[static_cast<std::size_t>(best)];
  const auto cands = metrics::extract_proper_nouns(chosen);
  std::vector<std::string> kept;
  std::size_t sentence_begin = 0;
  for (const auto& sentence : split_sentences(chosen)) {
    const std::size_t at = chosen.find(sentence, sentence_begin);
    const std::size_t from = (at == std::string::npos) ? sentence_begin : at;
    const std::size_t to = from + sentence.size();
    bool minority = false;
    for (const auto& cand : cands.entries) {
      if (cand.begin >= from && cand.end <= to && !majority.count(cand.normalized)) {
        minority = true;
        break;
      }
    }
    if (!minority) kept.push_back(sentence);
    sentence_begin = to;
  }
  bundle.final_caption = kept.empty() ? chosen : join_sentences(kept);
  return bundle;
}

}  // namespace mapcap::llm
