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

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ciplan/io/bundle.hpp"

namespace ciplan::cli {

struct ServeOptions {
  std::filesystem::path bundle;
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
  std::filesystem::path selection_out;  // default: <bundle>/selection.json
  bool once = false;  // stop after the selection has been written
};

// Local HTTP endpoints for the viewer:
//   GET  /bundle               bundle.json
//   GET  /bundle/files/<name>  a mesh payload listed by the manifest
//   POST /selection            {case_id, selected_entry_kind, timestamp};
//                              201 on the first valid record, 409 afterwards
// Requests are handled one at a time.
class BundleServer {
 public:
  explicit BundleServer(ServeOptions options);
  ~BundleServer();
  BundleServer(const BundleServer&) = delete;
  BundleServer& operator=(const BundleServer&) = delete;

  // Binds the socket; returns the bound port. Throws kIo on failure.
  int bind();
  // Blocks until stop() or, with `once`, until a selection is stored.
  void listen();
  void stop();

  std::optional<io::SelectionRecord> selection() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ciplan::cli
