// Copyright 2026 The lowthrust Authors
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

#ifndef LOWTHRUST_TOOLS_ARTIFACTS_HPP_
#define LOWTHRUST_TOOLS_ARTIFACTS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "lowthrust/evaluation.hpp"
#include "lowthrust/shooting.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust::tools {

namespace fs = std::filesystem;

// Everything downstream stages need from a converged nominal.
struct NominalArtifact {
  TransferProblem problem;
  ShootingUnknowns unknowns;
  double epsilon = 0.0;
};

void write_nominal(const fs::path& path, const NominalSolution& sol,
                   const ThrustConfig& thrust, const Units& units,
                   const IntegratorConfig& integrator);
NominalArtifact read_nominal(const fs::path& path);

// Creates the directory and returns it.
fs::path ensure_dir(const fs::path& dir);

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

// Rewrites <dir>/manifest.json listing every file below dir with its size
// and SHA-256, sorted by relative path.
void write_manifest(const fs::path& dir);

void write_text(const fs::path& path, const std::string& text);

// Time in years, masses in kg, state elements as stored.
void write_rollout_csv(const fs::path& path, const RolloutResult& r,
                       const Units& units);

std::string csv_double(double v);

}  // namespace lowthrust::tools

#endif  // LOWTHRUST_TOOLS_ARTIFACTS_HPP_
