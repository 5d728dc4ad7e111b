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
#include <iosfwd>
#include <string>

#include "ciplan/geometry/types.hpp"

namespace ciplan::geometry {

// ASCII PLY / STL with an explicit "mm" unit declaration. Coordinates are
// written with 17 significant digits so a write/read cycle is lossless.
void write_ply(std::ostream& out, const TriMesh& mesh);
TriMesh read_ply(std::istream& in, const std::string& label = {});

// STL stores unshared facets; vertices are re-merged on exact coordinate
// equality when reading.
void write_stl(std::ostream& out, const TriMesh& mesh);
TriMesh read_stl(std::istream& in, const std::string& label = {});

// Dispatch on extension (.ply / .stl).
void save_mesh(const std::filesystem::path& path, const TriMesh& mesh);
TriMesh load_mesh(const std::filesystem::path& path,
                  const std::string& label = {});

}  // namespace ciplan::geometry
