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

#ifndef STRSTUDIO_SERVICE_HTTP_SERVER_H_
#define STRSTUDIO_SERVICE_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "absl/status/statusor.h"
#include "strstudio/service/api.h"

namespace strstudio::service {

// HTTP/1.1 front end for ForecastApi. Requests are served concurrently from
// a thread pool.
class HttpServer {
 public:
  explicit HttpServer(const ForecastApi& api);
  ~HttpServer();

  // Binds to `port`, or to a free port when `port` is 0. Returns the port.
  absl::StatusOr<int> Bind(const std::string& host, int port);
  // Blocks until Stop() is called.
  absl::Status Listen();
  void Stop();
  // Blocks until the server accepts connections.
  void WaitUntilReady();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace strstudio::service

#endif  // STRSTUDIO_SERVICE_HTTP_SERVER_H_
