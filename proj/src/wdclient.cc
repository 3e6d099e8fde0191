// Copyright 2026 The Wembed Authors.
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

#include "wembed/wdclient.h"

#include <cstdlib>
#include <set>
#include <span>
#include <thread>

#include "httplib.h"

namespace wembed {

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl SplitUrl(const std::string &url) {
  size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw TransportError("invalid API URL: " + url);
  }
  size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string CacheKey(EntityId id, const std::string &language) {
  return id.str() + "|" + language;
}

std::string JoinIds(std::span<const EntityId> ids) {
  std::string out;
  for (EntityId id : ids) {
    if (!out.empty()) out += '|';
    out += id.str();
  }
  return out;
}

}  // namespace

std::string UrlEncode(const std::string &value) {
  static const char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : value) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' ||
        c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

HttpResponse HttpTransport::Get(const std::string &base_url,
                                const QueryParams &params,
                                const std::string &user_agent) {
  ParsedUrl url = SplitUrl(base_url);
  std::string target = url.path;
  char sep = target.find('?') == std::string::npos ? '?' : '&';
  for (const auto &[key, value] : params) {
    target += sep;
    target += UrlEncode(key) + "=" + UrlEncode(value);
    sep = '&';
  }
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  client.set_follow_location(true);
  httplib::Headers headers = {{"User-Agent", user_agent},
                              {"Accept", "application/json"}};
  auto result = client.Get(target, headers);
  if (!result) {
    throw TransportError("request to " + url.scheme_host_port + " failed: " +
                         httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

std::optional<std::optional<std::string>> LabelCache::Lookup(
    EntityId id, const std::string &language, Clock::time_point now) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = map_.find(CacheKey(id, language));
  if (it == map_.end()) return std::nullopt;
  if (now - it->second->fetched >= ttl_) {
    lru_.erase(it->second);
    map_.erase(it);
    return std::nullopt;
  }
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->label;
}

void LabelCache::Insert(EntityId id, const std::string &language,
                        std::optional<std::string> label,
                        Clock::time_point now) {
  if (capacity_ == 0) return;
  std::lock_guard<std::mutex> lock(mu_);
  std::string key = CacheKey(id, language);
  auto it = map_.find(key);
  if (it != map_.end()) {
    it->second->label = std::move(label);
    it->second->fetched = now;
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.push_front({key, std::move(label), now});
  map_.emplace(std::move(key), lru_.begin());
  while (lru_.size() > capacity_) {
    map_.erase(lru_.back().key);
    lru_.pop_back();
  }
}

size_t LabelCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return lru_.size();
}

ClientOptions ClientOptions::FromEnvironment() {
  ClientOptions options;
  if (const char *api = std::getenv("WEMBED_WIKIDATA_API"); api && *api) {
    options.api_base = api;
  }
  if (const char *ua = std::getenv("WEMBED_USER_AGENT"); ua && *ua) {
    options.user_agent = ua;
  }
  return options;
}

WikidataClient::WikidataClient(std::shared_ptr<Transport> transport,
                               ClientOptions options)
    : transport_(std::move(transport)),
      options_(std::move(options)),
      cache_(options_.cache_ttl, options_.cache_capacity),
      in_flight_(std::clamp(options_.max_in_flight, 1, 1024)) {
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

nlohmann::json WikidataClient::Call(const QueryParams &params) {
  for (int attempt = 0;; ++attempt) {
    try {
      HttpResponse response;
      {
        in_flight_.acquire();
        struct Release {
          std::counting_semaphore<1024> &s;
          ~Release() { s.release(); }
        } release{in_flight_};
        response =
            transport_->Get(options_.api_base, params, options_.user_agent);
      }
      if (response.status < 200 || response.status >= 300) {
        throw TransportError("HTTP status " + std::to_string(response.status));
      }
      nlohmann::json body = nlohmann::json::parse(response.body, nullptr,
                                                  /*allow_exceptions=*/false);
      if (body.is_discarded() || !body.is_object()) {
        throw TransportError("malformed JSON response");
      }
      if (body.contains("error")) {
        const auto &error = body["error"];
        throw RemoteError(error.value("code", "unknown"),
                          error.value("info", ""));
      }
      return body;
    } catch (const TransportError &) {
      if (attempt >= options_.retries) throw;
      size_t i = std::min<size_t>(attempt, options_.backoff.size() - 1);
      if (!options_.backoff.empty()) options_.sleep(options_.backoff[i]);
    }
  }
}

std::vector<SearchResult> WikidataClient::SearchEntities(
    const std::string &query, const std::string &language, int limit) {
  if (query.empty()) throw std::invalid_argument("empty search query");
  if (limit < 1 || limit > 50) {
    throw std::invalid_argument("limit must be in 1..50");
  }
  nlohmann::json body = Call({{"action", "wbsearchentities"},
                              {"search", query},
                              {"language", language},
                              {"uselang", language},
                              {"type", "item"},
                              {"format", "json"},
                              {"limit", std::to_string(limit)}});
  std::vector<SearchResult> results;
  if (!body.contains("search") || !body["search"].is_array()) {
    throw TransportError("response without search array");
  }
  for (const auto &hit : body["search"]) {
    if (!hit.is_object()) continue;
    auto id = EntityId::Parse(hit.value("id", ""));
    if (!id) continue;
    results.push_back({*id, hit.value("label", ""),
                       hit.value("description", ""), language});
  }
  return results;
}

LabelResult WikidataClient::GetLabels(
    const std::vector<EntityId> &ids, const std::string &language,
    const std::vector<std::string> &fallback_languages) {
  std::vector<std::string> chain = {language};
  for (const std::string &l : fallback_languages) {
    if (std::find(chain.begin(), chain.end(), l) == chain.end()) {
      chain.push_back(l);
    }
  }

  LabelResult result;
  std::vector<EntityId> to_fetch;
  std::set<EntityId> queued;
  auto now = options_.clock();

  // Resolves from the cache; false if some language in the chain is unknown
  // before a label is found.
  auto resolve = [&](EntityId id) {
    for (const std::string &l : chain) {
      auto hit = cache_.Lookup(id, l, now);
      if (!hit) return false;
      if (*hit) {
        result.labels[id] = **hit;
        return true;
      }
    }
    result.labels[id] = id.str();
    return true;
  };

  for (EntityId id : ids) {
    if (result.labels.count(id) || queued.count(id)) continue;
    if (!resolve(id)) {
      to_fetch.push_back(id);
      queued.insert(id);
    }
  }

  std::string languages;
  for (const std::string &l : chain) {
    if (!languages.empty()) languages += '|';
    languages += l;
  }

  for (size_t start = 0; start < to_fetch.size(); start += kMaxIdsPerRequest) {
    size_t end = std::min(to_fetch.size(), start + kMaxIdsPerRequest);
    std::span<const EntityId> chunk(to_fetch.data() + start, end - start);
    nlohmann::json body = Call({{"action", "wbgetentities"},
                                {"ids", JoinIds(chunk)},
                                {"props", "labels"},
                                {"languages", languages},
                                {"format", "json"}});
    const nlohmann::json empty = nlohmann::json::object();
    const nlohmann::json &entities =
        body.contains("entities") && body["entities"].is_object()
            ? body["entities"]
            : empty;
    auto fetched = options_.clock();
    for (EntityId id : chunk) {
      auto it = entities.find(id.str());
      if (it == entities.end() || it->contains("missing")) {
        result.unknown.push_back(id);
      }
      const nlohmann::json *labels = nullptr;
      if (it != entities.end() && it->contains("labels") &&
          (*it)["labels"].is_object()) {
        labels = &(*it)["labels"];
      }
      std::optional<std::string> display;
      for (const std::string &l : chain) {
        std::optional<std::string> label;
        if (labels && labels->contains(l) && (*labels)[l].is_object()) {
          label = (*labels)[l].value("value", "");
          if (label->empty()) label.reset();
        }
        if (label && !display) display = label;
        cache_.Insert(id, l, std::move(label), fetched);
      }
      result.labels[id] = display ? *display : id.str();
    }
  }
  return result;
}

}  // namespace wembed
