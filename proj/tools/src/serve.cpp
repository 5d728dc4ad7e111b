// Copyright 2026 The ciplan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ciplan_cli/serve.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ciplan/error.hpp"

namespace ciplan::cli {

namespace fs = std::filesystem;

struct BundleServer::Impl {
  ServeOptions options;
  std::string manifest;
  io::Bundle bundle;
  std::vector<std::string> payloads;
  httplib::Server server;
  int port = -1;
  mutable std::mutex mutex;
  std::optional<io::SelectionRecord> selection;
  std::thread stopper;
};

namespace {

void json_error(httplib::Response& res, int status, const std::string& msg) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", msg}}.dump() + "\n",
                  "application/json");
}

}  // namespace

BundleServer::BundleServer(ServeOptions options)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.options = std::move(options);
  const fs::path dir = fs::is_directory(s.options.bundle)
                           ? s.options.bundle
                           : s.options.bundle.parent_path();
  s.options.bundle = dir;
  if (s.options.selection_out.empty()) {
    s.options.selection_out = dir / "selection.json";
  }
  s.bundle = io::import_scene_bundle(dir);  // validates before serving
  s.manifest = io::read_text_file(dir / io::kBundleManifest);
  s.payloads = io::payload_files(s.bundle.scene);

  // One worker: requests are served strictly in order.
  s.server.new_task_queue = [] { return new httplib::ThreadPool(1); };
  s.server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  s.server.Get("/bundle", [&s](const httplib::Request&, httplib::Response& res) {
    res.set_content(s.manifest, "application/json");
  });
  s.server.Get(R"(/bundle/files/([A-Za-z0-9_.-]+))",
               [&s](const httplib::Request& req, httplib::Response& res) {
                 const std::string name = req.matches[1];
                 if (std::find(s.payloads.begin(), s.payloads.end(), name) ==
                     s.payloads.end()) {
                   json_error(res, 404, "no such payload: " + name);
                   return;
                 }
                 res.set_content(io::read_text_file(s.options.bundle / name),
                                 "text/plain");
               });
  s.server.Options("/selection", [](const httplib::Request&,
                                    httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.server.Post("/selection", [&s](const httplib::Request& req,
                                   httplib::Response& res) {
    io::SelectionRecord record;
    try {
      record = io::selection_from_json(req.body);
    } catch (const Error& e) {
      json_error(res, 400, e.what());
      return;
    }
    if (record.case_id != s.bundle.case_id) {
      json_error(res, 400, "case_id does not match the served bundle");
      return;
    }
    {
      std::lock_guard lock(s.mutex);
      if (s.selection) {
        json_error(res, 409, "a selection has already been recorded");
        return;
      }
      io::write_selection(s.options.selection_out, record);
      s.selection = record;
    }
    res.status = 201;
    res.set_content(io::selection_to_json(record), "application/json");
    if (s.options.once) {
      // Let the response go out before shutting down.
      s.stopper = std::thread([&s] { s.server.stop(); });
    }
  });
}

BundleServer::~BundleServer() {
  stop();
  if (impl_->stopper.joinable()) impl_->stopper.join();
}

int BundleServer::bind() {
  Impl& s = *impl_;
  if (s.options.port == 0) {
    s.port = s.server.bind_to_any_port(s.options.host);
  } else if (s.server.bind_to_port(s.options.host, s.options.port)) {
    s.port = s.options.port;
  }
  if (s.port <= 0) {
    throw Error(ErrorKind::kIo, "cannot bind " + s.options.host + ":" +
                                    std::to_string(s.options.port));
  }
  return s.port;
}

void BundleServer::listen() {
  if (impl_->port <= 0) bind();
  impl_->server.listen_after_bind();
  if (impl_->stopper.joinable()) impl_->stopper.join();
}

void BundleServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

std::optional<io::SelectionRecord> BundleServer::selection() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->selection;
}

}  // namespace ciplan::cli
