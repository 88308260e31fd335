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

#include "lowthrust/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <random>
#include <unordered_set>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

constexpr Eigen::Index kEvalChunk = 4096;

LossGradient task_loss(const Mlp& model, Task task, const TaskData& d,
                       const std::vector<Eigen::Index>& cols, bool with_grad) {
  const Matrix x = d.inputs(Eigen::all, cols);
  const Matrix y = d.targets(Eigen::all, cols);
  switch (task) {
    case Task::kPolicy:
      return loss_policy(model, x, y, with_grad);
    case Task::kValue:
      return loss_value(model, x, y, with_grad);
    case Task::kValueGradient:
      return loss_value_gradient(model, x, y, d.gradients(Eigen::all, cols),
                                 with_grad);
  }
  throw DomainError("unknown task");
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::kPolicy:
      return "policy";
    case Task::kValue:
      return "value";
    case Task::kValueGradient:
      return "value-gradient";
  }
  return "value";
}

Task task_from_string(const std::string& name) {
  if (name == "policy") return Task::kPolicy;
  if (name == "value") return Task::kValue;
  if (name == "value-gradient" || name == "value_gradient") {
    return Task::kValueGradient;
  }
  throw ConfigError("unknown training task '" + name +
                    "' (expected policy, value or value-gradient)");
}

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw ConfigError("training.batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) {
    throw ConfigError("training.learning_rate must be positive");
  }
  if (cfg.epochs < 1) throw ConfigError("training.epochs must be >= 1");
  const double sum = cfg.train_ratio + cfg.validation_ratio + cfg.test_ratio;
  if (!(cfg.train_ratio > 0.0 && cfg.validation_ratio > 0.0 &&
        cfg.test_ratio >= 0.0) ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("training split ratios must be positive and sum to 1");
  }
  for (int w : cfg.hidden) {
    if (w < 1) throw ConfigError("hidden layer widths must be positive");
  }
}

std::vector<int> default_hidden(Task task) {
  return std::vector<int>(task == Task::kPolicy ? 4 : 9, 100);
}

Split split_by_trajectory(const Dataset& data, double train_ratio,
                          double validation_ratio, std::uint64_t seed) {
  std::vector<std::int64_t> ids;
  for (const TrajectorySample& s : data.rows) {
    if (ids.empty() || ids.back() != s.trajectory_id) {
      ids.push_back(s.trajectory_id);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n = static_cast<double>(ids.size());
  const auto n_train = static_cast<std::size_t>(std::llround(train_ratio * n));
  const auto n_val = std::min(
      ids.size() - n_train,
      static_cast<std::size_t>(std::llround(validation_ratio * n)));
  Split s;
  s.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
  s.validation.assign(ids.begin() + static_cast<long>(n_train),
                      ids.begin() + static_cast<long>(n_train + n_val));
  s.test.assign(ids.begin() + static_cast<long>(n_train + n_val), ids.end());
  for (auto* v : {&s.train, &s.validation, &s.test}) {
    std::sort(v->begin(), v->end());
  }
  return s;
}

std::vector<TrajectorySample> select_rows(
    const Dataset& data, const std::vector<std::int64_t>& trajectory_ids) {
  const std::unordered_set<std::int64_t> keep(trajectory_ids.begin(),
                                              trajectory_ids.end());
  std::vector<TrajectorySample> out;
  for (const TrajectorySample& s : data.rows) {
    if (keep.count(s.trajectory_id) != 0) out.push_back(s);
  }
  return out;
}

Matrix state_inputs(const std::vector<TrajectorySample>& rows) {
  Matrix x(7, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    x.col(c).head<6>() = rows[j].x.to_vector();
    x(6, c) = rows[j].m;
  }
  return x;
}

Matrix policy_targets(const std::vector<TrajectorySample>& rows) {
  Matrix y(4, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    y(0, c) = rows[j].throttle;
    y.col(c).tail<3>() = (rows[j].direction.array() + 1.0) * 0.5;
  }
  return y;
}

Control decode_policy_output(const Vector& output) {
  if (output.size() != 4) throw DomainError("policy output must have 4 rows");
  Control c;
  c.throttle = std::clamp(output[0], 0.0, 1.0);
  const Vec3 d = 2.0 * output.tail<3>().array() - 1.0;
  const double n = d.norm();
  c.direction = n > 0.0 ? Vec3(d / n) : Vec3::UnitY();
  return c;
}

TaskData make_task_data(const std::vector<TrajectorySample>& rows, Task task) {
  TaskData d;
  d.inputs = state_inputs(rows);
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (task == Task::kPolicy) {
    d.targets = policy_targets(rows);
    return d;
  }
  d.targets.resize(1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d.targets(0, j) = rows[static_cast<std::size_t>(j)].value;
  }
  if (task == Task::kValueGradient) {
    d.gradients.resize(7, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Costate& c = rows[static_cast<std::size_t>(j)].costate;
      d.gradients.col(j).head<6>() = c.lambda;
      d.gradients(6, j) = c.lambda_m;
    }
  }
  return d;
}

double evaluate_loss(const Mlp& model, Task task, const TaskData& data) {
  const Eigen::Index n = data.inputs.cols();
  if (n == 0) return 0.0;
  double total = 0.0;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index begin = 0; begin < n; begin += kEvalChunk) {
    const Eigen::Index end = std::min(n, begin + kEvalChunk);
    cols.resize(static_cast<std::size_t>(end - begin));
    std::iota(cols.begin(), cols.end(), begin);
    total += task_loss(model, task, data, cols, false).loss *
             static_cast<double>(end - begin);
  }
  return total / static_cast<double>(n);
}

Mlp make_model(Task task, const std::vector<int>& hidden, std::uint64_t seed) {
  std::vector<int> dims{7};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(task == Task::kPolicy ? 4 : 1);
  return Mlp(dims, task == Task::kPolicy ? Activation::kSigmoid
                                         : Activation::kLinear,
             seed);
}

TrainedArtifact fit(const Dataset& data, const TrainConfig& cfg,
                    const EpochCallback& on_epoch) {
  validate(cfg);
  TrainedArtifact art;
  art.config = cfg;
  art.split = split_by_trajectory(data, cfg.train_ratio, cfg.validation_ratio,
                                  cfg.seed);
  if (art.split.train.empty() || art.split.validation.empty()) {
    throw ConfigError("dataset too small for the requested split");
  }
  const TaskData train =
      make_task_data(select_rows(data, art.split.train), cfg.task);
  const TaskData val =
      make_task_data(select_rows(data, art.split.validation), cfg.task);

  const std::vector<int> hidden =
      cfg.hidden.empty() ? default_hidden(cfg.task) : cfg.hidden;
  Mlp model = make_model(cfg.task, hidden, cfg.seed);
  if (cfg.task == Task::kPolicy) {
    model.input_normalization() = Normalization::fit(train.inputs);
  }
  AmsGrad opt(model.parameter_count(), cfg.optimizer);

  std::mt19937_64 rng(cfg.seed ^ 0x7a1bULL);
  const Eigen::Index n = train.inputs.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Eigen::Index> batch;
  art.best_validation_loss = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (Eigen::Index begin = 0; begin < n; begin += cfg.batch_size) {
      const Eigen::Index end = std::min<Eigen::Index>(n, begin + cfg.batch_size);
      batch.assign(order.begin() + begin, order.begin() + end);
      const LossGradient lg = task_loss(model, cfg.task, train, batch, true);
      if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
        throw ConvergenceError("training diverged at epoch " +
                               std::to_string(epoch));
      }
      opt.step(model.parameters(), lg.gradient, cfg.learning_rate);
      sum += lg.loss * static_cast<double>(end - begin);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = sum / static_cast<double>(n);
    rec.validation_loss = evaluate_loss(model, cfg.task, val);
    if (!std::isfinite(rec.validation_loss)) {
      throw ConvergenceError("validation loss not finite at epoch " +
                             std::to_string(epoch));
    }
    art.curve.push_back(rec);
    if (rec.validation_loss < art.best_validation_loss) {
      art.best_validation_loss = rec.validation_loss;
      art.best_epoch = epoch;
      art.model = model;
    }
    if (on_epoch) on_epoch(rec);
  }
  return art;
}

void save_artifact(const TrainedArtifact& artifact,
                   const std::filesystem::path& prefix) {
  auto with_suffix = [&](const char* suffix) {
    std::filesystem::path p = prefix;
    p += suffix;
    return p;
  };
  artifact.model.save(with_suffix(".bin"));

  std::ofstream curve(with_suffix(".curve.csv"), std::ios::trunc);
  curve << "epoch,train_loss,validation_loss\n";
  curve.precision(17);
  for (const EpochRecord& r : artifact.curve) {
    curve << r.epoch << ',' << r.train_loss << ',' << r.validation_loss << '\n';
  }
  if (!curve) throw IoError("cannot write " + with_suffix(".curve.csv").string());

  const TrainConfig& c = artifact.config;
  nlohmann::json summary{
      {"task", to_string(c.task)},
      {"best_epoch", artifact.best_epoch},
      {"best_validation_loss", artifact.best_validation_loss},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"optimizer",
       {{"name", "amsgrad"},
        {"beta1", c.optimizer.beta1},
        {"beta2", c.optimizer.beta2},
        {"epsilon", c.optimizer.epsilon}}},
      {"split_ratios", {c.train_ratio, c.validation_ratio, c.test_ratio}},
      {"seed", c.seed},
      {"dims", artifact.model.dims()},
      {"dataset_fingerprint", artifact.dataset_fingerprint},
      {"split",
       {{"train", artifact.split.train},
        {"validation", artifact.split.validation},
        {"test", artifact.split.test}}}};
  std::ofstream out(with_suffix(".summary.json"), std::ios::trunc);
  out << summary.dump(2) << '\n';
  if (!out) {
    throw IoError("cannot write " + with_suffix(".summary.json").string());
  }
}

}  // namespace lowthrust
