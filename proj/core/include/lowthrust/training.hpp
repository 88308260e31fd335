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

#ifndef LOWTHRUST_TRAINING_HPP_
#define LOWTHRUST_TRAINING_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lowthrust/dataset.hpp"
#include "lowthrust/neural.hpp"

namespace lowthrust {

enum class Task { kPolicy, kValue, kValueGradient };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

struct TrainConfig {
  Task task = Task::kValue;
  int batch_size = 8192;
  double learning_rate = 1e-5;
  int epochs = 300;
  AmsGradConfig optimizer;
  double train_ratio = 0.8;
  double validation_ratio = 0.1;
  double test_ratio = 0.1;
  std::uint64_t seed = 0;
  std::vector<int> hidden;  // empty selects the task default
};

void validate(const TrainConfig& cfg);

// 4 x 100 for the policy, 9 x 100 for the value networks.
std::vector<int> default_hidden(Task task);

// Whole trajectories go to one of the three sets.
struct Split {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> validation;
  std::vector<std::int64_t> test;
};

Split split_by_trajectory(const Dataset& data, double train_ratio,
                          double validation_ratio, std::uint64_t seed);

std::vector<TrajectorySample> select_rows(
    const Dataset& data, const std::vector<std::int64_t>& trajectory_ids);

// Network inputs [x, m], one column per sample.
Matrix state_inputs(const std::vector<TrajectorySample>& rows);

// [u, (i_tau + 1) / 2]: throttle and direction mapped into [0, 1].
Matrix policy_targets(const std::vector<TrajectorySample>& rows);
Control decode_policy_output(const Vector& output);

struct TaskData {
  Matrix inputs;
  Matrix targets;    // policy targets or the value row
  Matrix gradients;  // [lambda, lambda_m] for the gradient task
};

TaskData make_task_data(const std::vector<TrajectorySample>& rows, Task task);

// Batch-mean loss over a whole set, evaluated in fixed-size chunks.
double evaluate_loss(const Mlp& model, Task task, const TaskData& data);

Mlp make_model(Task task, const std::vector<int>& hidden, std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainedArtifact {
  Mlp model;  // lowest validation loss
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_validation_loss = 0.0;
  TrainConfig config;
  Split split;
  std::string dataset_fingerprint;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Throws ConvergenceError if a loss turns non-finite.
TrainedArtifact fit(const Dataset& data, const TrainConfig& cfg,
                    const EpochCallback& on_epoch = {});

// <prefix>.bin (+ .bin.json), <prefix>.curve.csv and <prefix>.summary.json.
void save_artifact(const TrainedArtifact& artifact,
                   const std::filesystem::path& prefix);

}  // namespace lowthrust

#endif  // LOWTHRUST_TRAINING_HPP_
