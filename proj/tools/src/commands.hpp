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

#ifndef LOWTHRUST_TOOLS_COMMANDS_HPP_
#define LOWTHRUST_TOOLS_COMMANDS_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lowthrust/config.hpp"
#include "artifacts.hpp"
#include "lowthrust/dataset.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/evaluation.hpp"
#include "lowthrust/factory.hpp"
#include "lowthrust/training.hpp"

namespace lowthrust::tools {

namespace fs = std::filesystem;

struct Context {
  RunConfig config;
  fs::path run_dir;
  std::ostream* log = nullptr;  // progress lines; null silences them
};

struct NominalOutcome {
  double tf_years = 0.0;
  double propellant_kg = 0.0;
  fs::path artifact;
};
// <out>/nominal.json, nominal_chain.csv, nominal_trajectory.csv.
NominalOutcome cmd_nominal(const Context& ctx, const fs::path& out_dir);

struct GenerateOutcome {
  FactoryStats stats;
  fs::path dataset;
};
GenerateOutcome cmd_generate(const Context& ctx, const fs::path& nominal,
                             const fs::path& out);

fs::path cmd_train(const Context& ctx, Task task, const fs::path& data,
                   const fs::path& out_prefix);

struct ModelPaths {
  std::optional<fs::path> policy;
  std::optional<fs::path> value;
  std::optional<fs::path> value_gradient;
};

// metrics.csv, rollout_<controller>.csv, gap_close.csv and evaluation.json.
void cmd_evaluate(const Context& ctx, const ModelPaths& models,
                  const fs::path& data, const fs::path& nominal,
                  const fs::path& out_dir);

struct LoadedModels {
  std::optional<Mlp> policy;
  std::optional<Mlp> value;
  std::optional<Mlp> value_gradient;
};
LoadedModels load_models(const ModelPaths& paths);

// Per-controller test-set errors on the trajectory-level test split.
std::vector<ControlErrorReport> test_metrics(const Context& ctx,
                                             const LoadedModels& models,
                                             const Dataset& data);

struct ClosedLoopRow {
  RolloutResult rollout;
  GapCloseResult gap;
};
// Optimal replay first, then each loaded network.
std::vector<ClosedLoopRow> closed_loop(const Context& ctx,
                                       const NominalArtifact& nominal,
                                       const LoadedModels& models);

enum class RolloutKind { kOptimal, kPolicy, kValue };
RolloutKind rollout_kind_from_string(const std::string& name);

void cmd_rollout(const Context& ctx, RolloutKind kind,
                 const std::optional<fs::path>& model,
                 const fs::path& nominal, const fs::path& out_csv);

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitConvergence = 3,
  kExitIo = 4,
};
int exit_code_for(const Error& e);

// Failure of a pipeline stage; keeps the exit code of the cause.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const Error& cause)
      : Error("stage '" + stage + "' failed: " + cause.what()),
        code_(exit_code_for(cause)) {}
  [[nodiscard]] int code() const { return code_; }

 private:
  int code_;
};

// nominal -> generate -> train x3 -> evaluate inside ctx.run_dir.
void cmd_pipeline(const Context& ctx);

}  // namespace lowthrust::tools

#endif  // LOWTHRUST_TOOLS_COMMANDS_HPP_
