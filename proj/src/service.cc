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

#include "wembed/service.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace wembed {

namespace {

using Json = nlohmann::ordered_json;

ApiResponse JsonResponse(int status, const Json &body) {
  return {status, "application/json", body.dump()};
}

ApiResponse Error(int status, const std::string &code,
                  std::initializer_list<std::pair<const char *, std::string>>
                      fields = {}) {
  Json body = {{"error", code}};
  for (const auto &[key, value] : fields) body[key] = value;
  return JsonResponse(status, body);
}

std::vector<std::string> SplitPath(const std::string &path) {
  std::vector<std::string> parts;
  size_t start = 1;
  while (start <= path.size()) {
    size_t end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

const char *ContentType(const std::string &path) {
  auto ends = [&](const char *ext) { return path.ends_with(ext); };
  if (ends(".html") || ends(".htm")) return "text/html; charset=utf-8";
  if (ends(".js") || ends(".mjs")) return "text/javascript";
  if (ends(".css")) return "text/css";
  if (ends(".json") || ends(".map")) return "application/json";
  if (ends(".svg")) return "image/svg+xml";
  if (ends(".png")) return "image/png";
  if (ends(".ico")) return "image/x-icon";
  if (ends(".txt")) return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

}  // namespace

void ApiConfig::Validate() const {
  if (k_default < 1 || k_default > k_max) {
    throw std::invalid_argument("need 1 <= k_default <= k_max");
  }
  if (port < 0 || port > 65535) throw std::invalid_argument("invalid port");
}

double RoundScore(double score) {
  double r = std::round(score * 1e6) / 1e6;
  return r == 0 ? 0.0 : r;
}

ApiHandler::ApiHandler(ApiConfig config) : config_(std::move(config)) {
  config_.Validate();
}

void ApiHandler::SetIndex(std::shared_ptr<const SimilarityIndex> index) {
  std::lock_guard<std::mutex> lock(mu_);
  index_ = std::move(index);
}

std::shared_ptr<const SimilarityIndex> ApiHandler::index() const {
  std::lock_guard<std::mutex> lock(mu_);
  return index_;
}

std::string ApiHandler::CorsOrigin(const std::string &request_origin) const {
  for (const std::string &allowed : config_.cors_origins) {
    if (allowed == "*") return "*";
    if (!request_origin.empty() && allowed == request_origin) return allowed;
  }
  return "";
}

ApiResponse ApiHandler::Handle(const std::string &method,
                               const std::string &path,
                               const RequestParams &params) const {
  if (method != "GET" && method != "HEAD") {
    return Error(405, "method-not-allowed", {{"method", method}});
  }
  if (path == "/healthz") return Health();
  if (path == "/" || path == "/index.html" || path.starts_with("/static/")) {
    return Static(path);
  }
  auto parts = SplitPath(path);
  if (parts.empty() || parts[0] != "api") {
    return Error(404, "not-found", {{"path", path}});
  }
  bool known = (parts.size() == 3 && (parts[1] == "most-similar" ||
                                      parts[1] == "vocab")) ||
               (parts.size() == 4 && parts[1] == "similarity");
  if (!known) return Error(404, "not-found", {{"path", path}});

  auto index = this->index();
  if (!index) return Error(503, "model-loading");
  if (parts[1] == "most-similar") return MostSimilar(*index, parts[2], params);
  if (parts[1] == "vocab") return Vocab(*index, parts[2]);
  return Similarity(*index, parts[2], parts[3]);
}

ApiResponse ApiHandler::MostSimilar(const SimilarityIndex &index,
                                    const std::string &entity,
                                    const RequestParams &params) const {
  auto id = EntityId::Parse(entity);
  if (!id) return Error(400, "malformed-entity", {{"entity", entity}});
  size_t n = config_.k_default;
  if (auto it = params.find("n"); it != params.end()) {
    const std::string &text = it->second;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc() || ptr != text.data() + text.size() || n < 1 ||
        n > config_.k_max) {
      return Error(400, "invalid-n",
                   {{"n", text},
                    {"allowed", "1.." + std::to_string(config_.k_max)}});
    }
  }
  if (!index.Contains(*id)) {
    return Error(404, "not-in-vocabulary", {{"entity", id->str()}});
  }
  Json hits = Json::array();
  for (const SimilarityHit &hit : index.MostSimilar(*id, n)) {
    hits.push_back(
        {{"item", hit.entity.str()}, {"similarity", RoundScore(hit.score)}});
  }
  return JsonResponse(200, {{"query", id->str()},
                            {"n", n},
                            {"most_similar", std::move(hits)}});
}

ApiResponse ApiHandler::Similarity(const SimilarityIndex &index,
                                   const std::string &a,
                                   const std::string &b) const {
  auto ia = EntityId::Parse(a);
  if (!ia) return Error(400, "malformed-entity", {{"entity", a}});
  auto ib = EntityId::Parse(b);
  if (!ib) return Error(400, "malformed-entity", {{"entity", b}});
  for (EntityId id : {*ia, *ib}) {
    if (!index.Contains(id)) {
      return Error(404, "not-in-vocabulary", {{"entity", id.str()}});
    }
  }
  return JsonResponse(200, {{"entity1", ia->str()},
                            {"entity2", ib->str()},
                            {"similarity",
                             RoundScore(index.Similarity(*ia, *ib))}});
}

ApiResponse ApiHandler::Vocab(const SimilarityIndex &index,
                              const std::string &entity) const {
  auto id = EntityId::Parse(entity);
  if (!id) return Error(400, "malformed-entity", {{"entity", entity}});
  return JsonResponse(
      200, {{"entity", id->str()}, {"in_vocabulary", index.Contains(*id)}});
}

ApiResponse ApiHandler::Health() const {
  auto index = this->index();
  if (!index) return JsonResponse(503, {{"status", "loading"}});
  return JsonResponse(200, {{"status", "ok"},
                            {"vocab_size", index->size()},
                            {"dim", index->dim()}});
}

ApiResponse ApiHandler::Static(const std::string &path) const {
  if (config_.static_dir.empty()) {
    return Error(404, "no-web-ui",
                 {{"hint", "the JSON API is available under /api/"}});
  }
  std::string relative = path == "/" ? "index.html" : path.substr(1);
  for (const std::string &part : SplitPath("/" + relative)) {
    if (part.empty() || part == "." || part == "..") {
      return Error(404, "not-found", {{"path", path}});
    }
  }
  std::string file = config_.static_dir + "/" + relative;
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    if (path == "/") {
      return Error(404, "no-web-ui",
                   {{"hint", "the JSON API is available under /api/"}});
    }
    return Error(404, "not-found", {{"path", path}});
  }
  std::ostringstream body;
  body << in.rdbuf();
  return {200, ContentType(file), body.str()};
}

ApiServer::ApiServer(const ApiHandler &handler)
    : handler_(handler), server_(std::make_unique<httplib::Server>()) {
  auto route = [this](const httplib::Request &req, httplib::Response &res) {
    RequestParams params(req.params.begin(), req.params.end());
    ApiResponse response = handler_.Handle(req.method, req.path, params);
    res.status = response.status;
    res.set_content(response.body, response.content_type);
    std::string origin =
        handler_.CorsOrigin(req.get_header_value("Origin"));
    if (!origin.empty()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      if (origin != "*") res.set_header("Vary", "Origin");
    }
  };
  server_->Get(".*", route);
  server_->Post(".*", route);
  server_->Put(".*", route);
  server_->Delete(".*", route);
  server_->Patch(".*", route);
}

ApiServer::~ApiServer() { Stop(); }

int ApiServer::Bind(const std::string &host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" +
                             std::to_string(port));
  }
  return port;
}

void ApiServer::Listen() { server_->listen_after_bind(); }

void ApiServer::Stop() {
  if (server_) server_->stop();
}

void ApiServer::WaitUntilReady() const { server_->wait_until_ready(); }

}  // namespace wembed
