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

#ifndef LOWTHRUST_CONFIG_HPP_
#define LOWTHRUST_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lowthrust/dataset.hpp"
#include "lowthrust/ephemeris.hpp"
#include "lowthrust/evaluation.hpp"
#include "lowthrust/factory.hpp"
#include "lowthrust/shooting.hpp"
#include "lowthrust/training.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

// Sectioned key = value run configuration. Physical units at this boundary.
struct RunConfig {
  struct Mission {
    std::string epoch = "2005-05-07";
    std::string departure = "earth";
    std::string arrival = "venus";
    MissionParameters spacecraft;
  } mission;

  struct Solver {
    double tolerance = 1e-8;
    int max_iterations = 60;
    double fd_step = 1e-7;
    double rel_tol = 1e-13;
    double abs_tol = 1e-13;
    std::vector<double> schedule = default_schedule();
    int restarts = 100;
    double costate_bound = 10.0;
    double tf_guess_years = 1.5;
    int keep = 4;
    std::uint64_t seed = 0;
  } solver;

  struct Factory {
    std::size_t n_trajectories = 2000;
    std::size_t n_samples = 100;
    double rho = 0.1;
    double rho_l = 0.1;
    double epsilon = 1e-6;
    std::uint64_t seed = 42;
    DatasetFormat format = DatasetFormat::kBinary;
  } factory;

  struct Training {
    int batch_size = 256;
    double learning_rate = 1e-3;
    int epochs = 50;
    double train_ratio = 0.8;
    double validation_ratio = 0.1;
    std::uint64_t seed = 1;
    std::vector<int> policy_hidden = default_hidden(Task::kPolicy);
    std::vector<int> value_hidden = default_hidden(Task::kValue);
  } training;

  struct Evaluation {
    std::size_t rollout_samples = 1000;
    double rollout_tolerance = 1e-10;
    // A chattering extracted policy otherwise crawls for the full default
    // integrator budget before the fallback epsilon is tried.
    std::size_t rollout_max_steps = 200000;
    double gap_tolerance = 1e-7;
    int gap_restarts = 40;
    int gap_keep = 1;
  } evaluation;

  struct Paths {
    std::string run_dir = "run";
  } paths;

  int threads = 1;

  [[nodiscard]] Epoch launch_epoch() const;
  [[nodiscard]] Units units() const;
  [[nodiscard]] ThrustConfig thrust(double epsilon) const;
  [[nodiscard]] TransferProblem problem() const;
  [[nodiscard]] SolverConfig solver_config() const;
  [[nodiscard]] RestartConfig restart_config() const;
  [[nodiscard]] PerturbationConfig perturbation_config() const;
  [[nodiscard]] TrainConfig train_config(Task task) const;
  [[nodiscard]] GapCloseConfig gap_close_config() const;
};

// Throws ConfigError naming the offending key.
void validate(const RunConfig& cfg);

// Reads an INI file; absent keys keep their defaults, unknown keys are errors.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(std::istream& in);

// Every key with its value and a short origin note, in INI syntax.
std::string render_run_config(const RunConfig& cfg);

}  // namespace lowthrust

#endif  // LOWTHRUST_CONFIG_HPP_
