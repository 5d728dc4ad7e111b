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

#include <cstdint>
#include <vector>

#include "ciplan/array/array_model.hpp"
#include "ciplan/geometry/scene_index.hpp"

namespace ciplan::plan {

using geometry::RigidTransform;
using geometry::Vec3;

struct RegistrationOptions {
  std::uint64_t seed = 0;
  // Deterministic starts place the basal contact at these cochlear angles.
  std::vector<double> start_angles_deg{0.0, 10.0, 20.0, 30.0, 45.0};
  int random_starts = 32;          // seeded perturbations of the above
  double penalty_weight = 1e4;     // on squared ST-penetration depth
  double penalty_margin = 1e-5;    // mm pushed past the ST surface
  // Target depth of each contact center inside the ST, measured from the
  // modiolar wall. Zero seats contact centers on the wall itself.
  double wall_standoff = 0.05;
  int max_iterations = 200;
  double relative_tolerance = 1e-12;
};

struct RegistrationReport {
  RigidTransform transform;     // array-local -> scene
  double cost = 0.0;            // final objective, standoff included
  double predicted_mmd = 0.0;   // mean contact-wall distance
  int iterations = 0;
  int start_index = -1;
  int starts_tried = 0;
  int feasible_starts = 0;
  std::vector<double> trace;    // objective after each accepted step
};

// Multi-start point-to-plane ICP of the contact centers onto the modiolar
// wall, with a quadratic penalty keeping every contact inside the ST.
// Throws kInfeasibleRegistration when no start ends with all contacts in ST.
RegistrationReport register_array(const geometry::SceneIndex& index,
                                  const array::RestingShape& shape,
                                  const RegistrationOptions& options = {});

}  // namespace ciplan::plan
