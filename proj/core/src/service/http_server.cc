/*
 * Copyright 2026 The STR Studio Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "strstudio/service/http_server.h"

#include "httplib.h"
#include "spdlog/spdlog.h"
#include "strstudio/util/strings.h"

namespace strstudio::service {

struct HttpServer::Impl {
  const ForecastApi& api;
  httplib::Server server;

  explicit Impl(const ForecastApi& a) : api(a) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest request;
      request.method = req.method;
      request.path = req.path;
      for (const auto& [key, value] : req.params) request.query[key] = value;
      request.body = req.body;
      const ApiResponse response = api.Handle(request);
      res.status = response.status;
      res.set_content(response.body.dump() + "\n", "application/json; charset=utf-8");
      res.set_header("Access-Control-Allow-Origin", "*");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
  }
};

HttpServer::HttpServer(const ForecastApi& api) : impl_(std::make_unique<Impl>(api)) {}

HttpServer::~HttpServer() { Stop(); }

absl::StatusOr<int> HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) return absl::UnavailableError(StrCat("cannot bind ", host));
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    return absl::UnavailableError(StrCat("cannot bind ", host, ":", port));
  }
  return port;
}

absl::Status HttpServer::Listen() {
  if (!impl_->server.listen_after_bind()) {
    return absl::UnavailableError("server stopped with an error");
  }
  return absl::OkStatus();
}

void HttpServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::WaitUntilReady() { impl_->server.wait_until_ready(); }

}  // namespace strstudio::service
