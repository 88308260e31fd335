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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <unistd.h>

#include "lowthrust/errors.hpp"
#include "lowthrust/factory.hpp"
#include "test_support.hpp"

namespace lowthrust {
namespace {

class TrainingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const ThrustConfig thrust = testing::nominal_thrust(1e-6);
    const NominalTerminal nominal = nominal_terminal(
        testing::nominal_problem(), testing::frozen_nominal_unknowns(), thrust);
    PerturbationConfig cfg;
    cfg.n_trajectories = 40;
    cfg.n_samples = 25;
    cfg.seed = 11;
    data_ = new Dataset();
    run_factory(nominal, thrust, cfg, [](Trajectory&& t) {
      data_->rows.insert(data_->rows.end(), t.begin(), t.end());
    });
    data_->header.n_trajectories = 40;
    data_->header.n_rows = static_cast<std::int64_t>(data_->rows.size());
  }
  static void TearDownTestSuite() { delete data_; }

  static TrainConfig small(Task task) {
    TrainConfig c;
    c.task = task;
    c.batch_size = 64;
    c.learning_rate = 1e-3;
    c.epochs = 10;
    c.seed = 3;
    c.hidden = {16, 16};
    return c;
  }

  static Dataset* data_;
};

Dataset* TrainingTest::data_ = nullptr;

TEST_F(TrainingTest, SplitIsDisjointAndCoversEveryTrajectory) {
  const Split s = split_by_trajectory(*data_, 0.8, 0.1, 9);
  EXPECT_EQ(s.train.size(), 32u);
  EXPECT_EQ(s.validation.size(), 4u);
  EXPECT_EQ(s.test.size(), 4u);
  std::set<std::int64_t> all;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (std::int64_t id : *part) EXPECT_TRUE(all.insert(id).second) << id;
  }
  EXPECT_EQ(all.size(), 40u);
  EXPECT_EQ(*all.begin(), 0);
  EXPECT_EQ(*all.rbegin(), 39);

  // Rows follow their trajectory.
  const auto rows = select_rows(*data_, s.test);
  EXPECT_EQ(rows.size(), 4u * 25u);
  const std::set<std::int64_t> test_ids(s.test.begin(), s.test.end());
  for (const auto& r : rows) EXPECT_TRUE(test_ids.count(r.trajectory_id));

  const Split again = split_by_trajectory(*data_, 0.8, 0.1, 9);
  EXPECT_EQ(again.train, s.train);
  const Split other = split_by_trajectory(*data_, 0.8, 0.1, 10);
  EXPECT_NE(other.train, s.train);
}

TEST_F(TrainingTest, PolicyTargetsAreScaledIntoTheUnitBox) {
  const Matrix t = policy_targets(data_->rows);
  ASSERT_EQ(t.rows(), 4);
  EXPECT_GE(t.minCoeff(), 0.0);
  EXPECT_LE(t.maxCoeff(), 1.0);
  const TrajectorySample& s = data_->rows[7];
  EXPECT_EQ(t(0, 7), s.throttle);
  EXPECT_DOUBLE_EQ(t(2, 7), (s.direction[1] + 1.0) / 2.0);

  const Control c = decode_policy_output(t.col(7));
  EXPECT_NEAR(c.throttle, s.throttle, 1e-15);
  EXPECT_LT((c.direction - s.direction).norm(), 1e-14);
}

TEST(TrainingDecode, ClampsAndRenormalizes) {
  Vector out(4);
  out << 1.3, 0.5, 0.5, 0.5;
  const Control c = decode_policy_output(out);
  EXPECT_EQ(c.throttle, 1.0);
  EXPECT_EQ(c.direction, Vec3(0.0, 1.0, 0.0));  // zero vector falls back
  out << -0.2, 1.0, 0.5, 0.5;
  const Control d = decode_policy_output(out);
  EXPECT_EQ(d.throttle, 0.0);
  EXPECT_NEAR(d.direction.norm(), 1.0, 1e-15);
  EXPECT_NEAR(d.direction[0], 1.0, 1e-15);
}

TEST_F(TrainingTest, TaskDataShapes) {
  const TaskData p = make_task_data(data_->rows, Task::kPolicy);
  EXPECT_EQ(p.inputs.rows(), 7);
  EXPECT_EQ(p.targets.rows(), 4);
  const TaskData g = make_task_data(data_->rows, Task::kValueGradient);
  EXPECT_EQ(g.targets.rows(), 1);
  EXPECT_EQ(g.gradients.rows(), 7);
  EXPECT_EQ(g.gradients(6, 3), data_->rows[3].costate.lambda_m);
  EXPECT_EQ(g.targets(0, 3), data_->rows[3].value);
}

TEST_F(TrainingTest, LossDecreasesOverTenEpochs) {
  for (Task task : {Task::kPolicy, Task::kValue, Task::kValueGradient}) {
    const TrainedArtifact art = fit(*data_, small(task));
    ASSERT_EQ(art.curve.size(), 10u);
    int rises = 0;
    for (std::size_t i = 1; i < art.curve.size(); ++i) {
      if (art.curve[i].train_loss > art.curve[i - 1].train_loss) ++rises;
    }
    EXPECT_LE(rises, 2) << to_string(task);
    EXPECT_LT(art.curve.back().train_loss, art.curve.front().train_loss)
        << to_string(task);
  }
}

TEST_F(TrainingTest, BestEpochHasTheLowestValidationLoss) {
  const TrainedArtifact art = fit(*data_, small(Task::kValue));
  const auto best = std::min_element(
      art.curve.begin(), art.curve.end(), [](const auto& a, const auto& b) {
        return a.validation_loss < b.validation_loss;
      });
  EXPECT_EQ(art.best_epoch, best->epoch);
  EXPECT_EQ(art.best_validation_loss, best->validation_loss);
  // The kept model is the one from that epoch.
  const TaskData val =
      make_task_data(select_rows(*data_, art.split.validation), Task::kValue);
  EXPECT_NEAR(evaluate_loss(art.model, Task::kValue, val),
              art.best_validation_loss, 1e-12 * art.best_validation_loss);
}

TEST_F(TrainingTest, IdenticalSeedsGiveIdenticalRuns) {
  TrainConfig c = small(Task::kValueGradient);
  c.epochs = 3;
  const TrainedArtifact a = fit(*data_, c);
  const TrainedArtifact b = fit(*data_, c);
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].train_loss, b.curve[i].train_loss);
    EXPECT_EQ(a.curve[i].validation_loss, b.curve[i].validation_loss);
  }
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
  EXPECT_EQ(a.dataset_fingerprint, b.dataset_fingerprint);
  c.seed = 4;
  EXPECT_NE(fit(*data_, c).curve.back().train_loss, a.curve.back().train_loss);
}

TEST_F(TrainingTest, PolicyInputsAreNormalizedWithTrainingStatistics) {
  TrainConfig c = small(Task::kPolicy);
  c.epochs = 1;
  const TrainedArtifact art = fit(*data_, c);
  const Normalization& n = art.model.input_normalization();
  ASSERT_FALSE(n.identity());
  const Matrix x = state_inputs(select_rows(*data_, art.split.train));
  const Vector mean = x.rowwise().mean();
  EXPECT_LT((n.mean - mean).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix z = n.normalize(x);
  EXPECT_LT(z.rowwise().mean().cwiseAbs().maxCoeff(), 1e-10);
}

TEST_F(TrainingTest, DefaultArchitectures) {
  EXPECT_EQ(default_hidden(Task::kPolicy), std::vector<int>(4, 100));
  EXPECT_EQ(default_hidden(Task::kValue), std::vector<int>(9, 100));
  const Mlp p = make_model(Task::kPolicy, default_hidden(Task::kPolicy), 0);
  EXPECT_EQ(p.output_dim(), 4);
  EXPECT_EQ(p.output_activation(), Activation::kSigmoid);
  const Mlp v = make_model(Task::kValueGradient, {8}, 0);
  EXPECT_EQ(v.output_dim(), 1);
  EXPECT_EQ(v.output_activation(), Activation::kLinear);
}

TEST(TrainingConfig, TaskNamesAndValidation) {
  EXPECT_EQ(task_from_string("value-gradient"), Task::kValueGradient);
  EXPECT_EQ(task_from_string("value_gradient"), Task::kValueGradient);
  EXPECT_EQ(to_string(Task::kPolicy), "policy");
  EXPECT_THROW(task_from_string("critic"), ConfigError);
  TrainConfig c;
  EXPECT_NO_THROW(validate(c));
  c.batch_size = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = TrainConfig{};
  c.train_ratio = 0.95;
  EXPECT_THROW(validate(c), ConfigError);
  c = TrainConfig{};
  c.learning_rate = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST_F(TrainingTest, SavedArtifactRoundTrips) {
  TrainConfig c = small(Task::kValue);
  c.epochs = 2;
  const TrainedArtifact art = fit(*data_, c);
  const auto dir = std::filesystem::temp_directory_path() /
                   ("lowthrust_train_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  save_artifact(art, dir / "value");
  for (const char* f : {"value.bin", "value.bin.json", "value.curve.csv",
                        "value.summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const Mlp loaded = Mlp::load(dir / "value.bin");
  EXPECT_EQ(loaded.parameters(), art.model.parameters());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace lowthrust
