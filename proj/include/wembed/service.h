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

#ifndef WEMBED_SERVICE_H_
#define WEMBED_SERVICE_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "wembed/store.h"

namespace httplib {
class Server;
}

namespace wembed {

struct ApiConfig {
  std::string bind_address = "0.0.0.0";
  int port = 8000;
  std::string model_path;
  size_t k_default = 10;
  size_t k_max = 100;
  std::vector<std::string> cors_origins = {"*"};
  std::string static_dir;  // empty: no web UI bundle

  void Validate() const;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using RequestParams = std::multimap<std::string, std::string>;

// Routes requests to the similarity index. Stateless apart from the model
// pointer, which is set once loading completes.
class ApiHandler {
 public:
  explicit ApiHandler(ApiConfig config);

  void SetIndex(std::shared_ptr<const SimilarityIndex> index);
  std::shared_ptr<const SimilarityIndex> index() const;

  ApiResponse Handle(const std::string &method, const std::string &path,
                     const RequestParams &params) const;

  // Value for Access-Control-Allow-Origin, or empty for none.
  std::string CorsOrigin(const std::string &request_origin) const;

  const ApiConfig &config() const { return config_; }

 private:
  ApiResponse MostSimilar(const SimilarityIndex &index,
                          const std::string &entity,
                          const RequestParams &params) const;
  ApiResponse Similarity(const SimilarityIndex &index, const std::string &a,
                         const std::string &b) const;
  ApiResponse Vocab(const SimilarityIndex &index,
                    const std::string &entity) const;
  ApiResponse Health() const;
  ApiResponse Static(const std::string &path) const;

  ApiConfig config_;
  mutable std::mutex mu_;
  std::shared_ptr<const SimilarityIndex> index_;
};

// Rounds to 6 decimal places for the wire format.
double RoundScore(double score);

// HTTP/1.1 front end for an ApiHandler.
class ApiServer {
 public:
  explicit ApiServer(const ApiHandler &handler);
  ~ApiServer();

  ApiServer(const ApiServer &) = delete;
  ApiServer &operator=(const ApiServer &) = delete;

  // Returns the bound port; port 0 picks a free one. Throws on failure.
  int Bind(const std::string &host, int port);
  // Blocks until Stop().
  void Listen();
  void Stop();
  void WaitUntilReady() const;

 private:
  const ApiHandler &handler_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace wembed

#endif  // WEMBED_SERVICE_H_
