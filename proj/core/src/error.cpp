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

#include "ciplan/error.hpp"

namespace ciplan {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kDegeneratePoint: return "degenerate-point";
    case ErrorKind::kUndersampledPath: return "undersampled-path";
    case ErrorKind::kEmptyGeometry: return "empty-geometry";
    case ErrorKind::kTopology: return "topology";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kInfeasibleRegistration: return "infeasible-registration";
    case ErrorKind::kDegenerateDirection: return "degenerate-direction";
    case ErrorKind::kNoIntersection: return "no-intersection";
    case ErrorKind::kIncompletePlan: return "incomplete-plan";
    case ErrorKind::kMissingData: return "missing-data";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kEmptyGroup: return "empty-group";
    case ErrorKind::kLengthMismatch: return "length-mismatch";
    case ErrorKind::kDegenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace ciplan
