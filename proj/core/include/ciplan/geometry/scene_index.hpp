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

#include "ciplan/geometry/mesh_index.hpp"
#include "ciplan/geometry/types.hpp"

namespace ciplan::geometry {

// Spatial indices for every mesh in a scene. Keeps a copy of the scene, so
// it stays valid independently of the source object.
class SceneIndex {
 public:
  explicit SceneIndex(CochlearScene scene);

  const CochlearScene& scene() const { return scene_; }
  const MeshIndex& st() const { return st_; }
  const MeshIndex& sv() const { return sv_; }
  const MeshIndex& wall() const { return wall_; }
  const MeshIndex& ossicles() const { return ossicles_; }

 private:
  CochlearScene scene_;
  MeshIndex st_;
  MeshIndex sv_;
  MeshIndex wall_;
  MeshIndex ossicles_;
};

}  // namespace ciplan::geometry
