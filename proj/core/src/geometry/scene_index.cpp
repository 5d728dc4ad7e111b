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

#include "ciplan/geometry/scene_index.hpp"

#include <utility>

namespace ciplan::geometry {

SceneIndex::SceneIndex(CochlearScene scene)
    : scene_(std::move(scene)),
      st_(scene_.st),
      sv_(scene_.sv),
      wall_(scene_.modiolar_wall),
      ossicles_(scene_.ossicles) {
  scene_.validate();
}

}  // namespace ciplan::geometry
