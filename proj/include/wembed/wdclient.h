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

#ifndef WEMBED_WDCLIENT_H_
#define WEMBED_WDCLIENT_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wembed/entity.h"

namespace wembed {

inline constexpr char kDefaultWikidataApi[] = "https://www.wikidata.org/w/api.php";
inline constexpr char kDefaultUserAgent[] =
    "wembed/0.1.0 (Wikidata entity embedding service; set WEMBED_USER_AGENT "
    "to add contact details)";

using QueryParams = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Network failure, non-2xx status or unparseable body. Retried.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The API answered with an "error" object. Not retried.
class RemoteError : public std::runtime_error {
 public:
  RemoteError(std::string code, const std::string &info)
      : std::runtime_error("wikidata api error " + code + ": " + info),
        code_(std::move(code)) {}
  const std::string &code() const { return code_; }

 private:
  std::string code_;
};

// All network access goes through this interface.
class Transport {
 public:
  virtual ~Transport() = default;
  // Issues GET base_url?params. Throws TransportError on connection failure;
  // any HTTP status is returned.
  virtual HttpResponse Get(const std::string &base_url,
                           const QueryParams &params,
                           const std::string &user_agent) = 0;
};

// Transport backed by cpp-httplib; supports http and https base URLs.
class HttpTransport : public Transport {
 public:
  HttpResponse Get(const std::string &base_url, const QueryParams &params,
                   const std::string &user_agent) override;
};

// Percent-encodes a query string component.
std::string UrlEncode(const std::string &value);

struct SearchResult {
  EntityId id;
  std::string label;
  std::string description;
  std::string language;
};

// (entity, language) -> label with a TTL and LRU eviction. A cached empty
// optional records that the entity has no label in that language.
class LabelCache {
 public:
  using Clock = std::chrono::steady_clock;

  LabelCache(std::chrono::seconds ttl, size_t capacity)
      : ttl_(ttl), capacity_(capacity) {}

  // Outer optional: cache hit. Inner optional: label present.
  std::optional<std::optional<std::string>> Lookup(EntityId id,
                                                   const std::string &language,
                                                   Clock::time_point now);
  void Insert(EntityId id, const std::string &language,
              std::optional<std::string> label, Clock::time_point now);

  size_t size() const;

 private:
  struct Entry {
    std::string key;
    std::optional<std::string> label;
    Clock::time_point fetched;
  };

  std::chrono::seconds ttl_;
  size_t capacity_;
  mutable std::mutex mu_;
  std::list<Entry> lru_;  // most recent first
  std::unordered_map<std::string, std::list<Entry>::iterator> map_;
};

struct ClientOptions {
  std::string api_base = kDefaultWikidataApi;
  std::string user_agent = kDefaultUserAgent;
  int retries = 2;
  std::vector<std::chrono::milliseconds> backoff = {
      std::chrono::milliseconds(250), std::chrono::milliseconds(1000)};
  std::chrono::seconds cache_ttl = std::chrono::hours(1);
  size_t cache_capacity = 100000;
  int max_in_flight = 4;
  std::function<LabelCache::Clock::time_point()> clock =
      [] { return LabelCache::Clock::now(); };
  std::function<void(std::chrono::milliseconds)> sleep;

  // Defaults with WEMBED_WIKIDATA_API and WEMBED_USER_AGENT applied.
  static ClientOptions FromEnvironment();
};

struct LabelResult {
  // Display label per requested id; the serialized id when no label exists.
  std::map<EntityId, std::string> labels;
  // Ids the API reported as missing.
  std::vector<EntityId> unknown;
};

class WikidataClient {
 public:
  static constexpr size_t kMaxIdsPerRequest = 50;

  WikidataClient(std::shared_ptr<Transport> transport,
                 ClientOptions options = {});

  // wbsearchentities. Results keep the API order.
  std::vector<SearchResult> SearchEntities(const std::string &query,
                                           const std::string &language,
                                           int limit = 7);

  // wbgetentities with props=labels. For each id the first language of
  // [language] + fallback_languages that has a label wins.
  LabelResult GetLabels(const std::vector<EntityId> &ids,
                        const std::string &language,
                        const std::vector<std::string> &fallback_languages = {});

  const ClientOptions &options() const { return options_; }
  LabelCache &cache() { return cache_; }

 private:
  // GET with retries on TransportError; the result has been checked for an
  // API "error" object.
  nlohmann::json Call(const QueryParams &params);

  std::shared_ptr<Transport> transport_;
  ClientOptions options_;
  LabelCache cache_;
  std::counting_semaphore<1024> in_flight_;
};

}  // namespace wembed

#endif  // WEMBED_WDCLIENT_H_
