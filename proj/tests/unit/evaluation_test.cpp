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

#include "lowthrust/evaluation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lowthrust/errors.hpp"
#include "lowthrust/factory.hpp"
#include "test_support.hpp"

namespace lowthrust {
namespace {

// Value model whose input gradient is a fixed co-state everywhere.
Mlp linear_value_model(const Costate& c) {
  Mlp model({7, 1}, Activation::kLinear, 0);
  model.parameters().setZero();
  model.weight(0).row(0).head<6>() = c.lambda.transpose();
  model.weight(0)(0, 6) = c.lambda_m;
  return model;
}

class FixedController : public Controller {
 public:
  explicit FixedController(Control c) : c_(c) {}
  std::string name() const override { return "fixed"; }
  Control control(const EquinoctialState&, double) const override {
    return c_;
  }

 private:
  Control c_;
};

// Looks up the stored label of the exact state it is asked about.
class OracleController : public Controller {
 public:
  explicit OracleController(const std::vector<TrajectorySample>& rows)
      : rows_(rows) {}
  std::string name() const override { return "oracle"; }
  Control control(const EquinoctialState& x, double m) const override {
    for (const TrajectorySample& s : rows_) {
      if (s.m == m && s.x.to_vector() == x.to_vector()) {
        Control c;
        c.throttle = s.throttle;
        c.direction = s.direction;
        return c;
      }
    }
    throw DomainError("state not in table");
  }

 private:
  const std::vector<TrajectorySample>& rows_;
};

// Fails once the true longitude passes a threshold.
class FailingController : public Controller {
 public:
  std::string name() const override { return "failing"; }
  Control control(const EquinoctialState& x, double) const override {
    if (x.L > start_L_ + 1.0) throw DomainError("controller gave up");
    Control c;
    c.throttle = 0.0;
    return c;
  }
  double start_L_ = 0.0;
};

class EvaluationTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    problem_ = new TransferProblem(testing::nominal_problem());
    thrust_ = new ThrustConfig(testing::nominal_thrust(1e-6));
    nominal_ = new NominalTerminal(nominal_terminal(
        *problem_, testing::frozen_nominal_unknowns(), *thrust_));
    PerturbationConfig cfg;
    cfg.n_trajectories = 3;
    cfg.n_samples = 20;
    cfg.seed = 5;
    rows_ = new std::vector<TrajectorySample>();
    run_factory(*nominal_, *thrust_, cfg, [](Trajectory&& t) {
      rows_->insert(rows_->end(), t.begin(), t.end());
    });
  }
  static void TearDownTestSuite() {
    delete problem_;
    delete thrust_;
    delete nominal_;
    delete rows_;
  }
  static TransferProblem* problem_;
  static ThrustConfig* thrust_;
  static NominalTerminal* nominal_;
  static std::vector<TrajectorySample>* rows_;
};

TransferProblem* EvaluationTest::problem_ = nullptr;
ThrustConfig* EvaluationTest::thrust_ = nullptr;
NominalTerminal* EvaluationTest::nominal_ = nullptr;
std::vector<TrajectorySample>* EvaluationTest::rows_ = nullptr;

TEST_F(EvaluationTest, ExactCostatesReproduceStoredLabels) {
  for (const TrajectorySample& s : *rows_) {
    const Mlp model = linear_value_model(s.costate);
    const Control c = policy_from_value_net(model, s.x, s.m, *thrust_);
    EXPECT_NEAR(c.throttle, s.throttle, 1e-10);
    EXPECT_LT((c.direction - s.direction).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST_F(EvaluationTest, ExtractionAtZeroEpsilonIsBangBangWithUnitDirection) {
  const ThrustConfig bang = thrust_->with_epsilon(0.0);
  for (const TrajectorySample& s : *rows_) {
    const Control c =
        policy_from_value_net(linear_value_model(s.costate), s.x, s.m, bang);
    EXPECT_TRUE(c.throttle == 0.0 || c.throttle == 1.0) << c.throttle;
    EXPECT_NEAR(c.direction.norm(), 1.0, 1e-14);
  }
}

TEST(EvaluationControllers, RejectWrongShapes) {
  EXPECT_THROW(PolicyNetController(Mlp({7, 5, 1}, Activation::kSigmoid, 0)),
               DomainError);
  EXPECT_THROW(ValueNetController(Mlp({7, 5, 4}, Activation::kLinear, 0),
                                  testing::nominal_thrust(0.0), "v"),
               DomainError);
}

TEST_F(EvaluationTest, OracleControllerScoresZero) {
  const ControlErrorReport r = control_errors(OracleController(*rows_), *rows_);
  EXPECT_EQ(r.samples, rows_->size());
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.physical[i].mean, 0.0);
    EXPECT_EQ(r.physical[i].std, 0.0);
    EXPECT_EQ(r.scaled[i].mean, 0.0);
  }
  EXPECT_FALSE(r.value.has_value());
}

TEST_F(EvaluationTest, ScaledErrorsAreHalfThePhysicalDirectionErrors) {
  Control c;
  c.throttle = 0.5;
  c.direction = Vec3(0.0, 1.0, 0.0);
  const ControlErrorReport r = control_errors(FixedController(c), *rows_);
  EXPECT_DOUBLE_EQ(r.scaled[0].mean, r.physical[0].mean);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_NEAR(r.scaled[i].mean, 0.5 * r.physical[i].mean, 1e-15);
  }
}

TEST(EvaluationErrorStats, MatchesHandComputedValues) {
  const ErrorStats s = error_stats({1.0, 2.0, 3.0, 6.0});
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(3.5));
  const ErrorStats empty = error_stats({});
  EXPECT_EQ(empty.mean, 0.0);
}

TEST_F(EvaluationTest, ValueErrorOfConstantModel) {
  Mlp model({7, 1}, Activation::kLinear, 0);
  model.parameters().setZero();
  ControlErrorReport r;
  add_value_error(r, model, *rows_);
  ASSERT_TRUE(r.value.has_value());
  double mean = 0.0;
  for (const TrajectorySample& s : *rows_) mean += std::abs(s.value);
  EXPECT_NEAR(r.value->mean, mean / rows_->size(), 1e-12);
}

TEST_F(EvaluationTest, OrbitDistanceIgnoresTrueLongitude) {
  EquinoctialState x = problem_->target;
  for (double L : {0.0, 1.0, 4.0, 100.0}) {
    x.L = L;
    EXPECT_EQ(orbit_distance(x, problem_->target), 0.0);
  }
  x.p += 3e-3;
  x.k -= 4e-3;
  EXPECT_NEAR(orbit_distance(x, problem_->target), 5e-3, 1e-15);
  EXPECT_LT(orbit_distance(nominal_->terminal.x, problem_->target), 1e-8);
}

TEST_F(EvaluationTest, CartesianDistanceOnAndOffTheOrbit) {
  EquinoctialState x = problem_->target;
  x.L = 2.0 * std::numbers::pi * 17.0 / 360.0;
  EXPECT_LT(cartesian_distance_to_orbit(x, problem_->target), 1e-12);
  // Half-way between two sample points the nearest one is half a spacing
  // away along the orbit.
  x.L += std::numbers::pi / 360.0;
  const double r = to_cartesian(x).r.norm();
  const double half_spacing = 2.0 * r * std::sin(std::numbers::pi / 720.0);
  EXPECT_NEAR(cartesian_distance_to_orbit(x, problem_->target), half_spacing,
              0.02 * half_spacing);
  // A circular orbit 0.01 AU further out, queried on a sample longitude.
  EquinoctialState wide = problem_->target;
  wide.f = wide.g = 0.0;
  EquinoctialState outer = wide;
  outer.p += 0.01;
  outer.L = 0.0;
  EXPECT_NEAR(cartesian_distance_to_orbit(outer, wide), 0.01, 1e-12);
  EXPECT_THROW(cartesian_distance_to_orbit(x, wide, 0), DomainError);
}

TEST_F(EvaluationTest, PmpReplayReachesTheNominalTerminalState) {
  const ShootingUnknowns u = testing::frozen_nominal_unknowns();
  const RolloutResult r =
      replay_pmp(initial_state(u, *problem_), u.tf, problem_->target,
                 *thrust_, 200);
  ASSERT_TRUE(r.completed) << r.error;
  ASSERT_EQ(r.times.size(), 200u);
  const Vec6 d = r.states.back().to_vector() - nominal_->terminal.x.to_vector();
  EXPECT_LT(d.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(r.masses.back(), nominal_->terminal.m, 1e-6);
  EXPECT_LT(r.terminal_residual, 1e-8);
  EXPECT_NEAR(r.propellant_spent, 1.0 - nominal_->terminal.m, 1e-6);
}

TEST_F(EvaluationTest, CoastingSpendsNothing) {
  Control off;
  off.throttle = 0.0;
  const RolloutResult r = rollout(FixedController(off), problem_->x0, 1.0, 3.0,
                                  problem_->target, *thrust_, 50);
  ASSERT_TRUE(r.completed);
  EXPECT_EQ(r.propellant_spent, 0.0);
  for (double m : r.masses) EXPECT_EQ(m, 1.0);
}

TEST_F(EvaluationTest, PropellantMatchesThrottleIntegral) {
  Control half;
  half.throttle = 0.5;
  const double tf = 4.0;
  const RolloutResult r = rollout(FixedController(half), problem_->x0, 1.0, tf,
                                  problem_->target, *thrust_, 100);
  ASSERT_TRUE(r.completed);
  EXPECT_NEAR(r.propellant_spent, thrust_->c2 * 0.5 * tf, 1e-12);
  for (std::size_t i = 1; i < r.masses.size(); ++i) {
    EXPECT_LE(r.masses[i], r.masses[i - 1]);
  }
  EXPECT_GE(r.terminal_residual, 0.0);
  EXPECT_EQ(r.orbit_distance.size(), r.times.size());
  EXPECT_EQ(r.cartesian_distance.size(), r.times.size());
}

TEST_F(EvaluationTest, FailureKeepsThePartialTrajectory) {
  FailingController c;
  c.start_L_ = problem_->x0.L;
  const RolloutResult r =
      rollout(c, problem_->x0, 1.0, 8.0, problem_->target, *thrust_, 100);
  EXPECT_FALSE(r.completed);
  EXPECT_NE(r.error.find("controller gave up"), std::string::npos);
  EXPECT_GT(r.times.size(), 1u);
  EXPECT_LT(r.times.size(), 100u);
  EXPECT_EQ(r.states.size(), r.times.size());
}

TEST_F(EvaluationTest, GapCloseFromTheNominalTerminalStateIsFree) {
  const GapCloseResult g =
      gap_close(nominal_->terminal.x, nominal_->terminal.m, problem_->target,
                thrust_->with_epsilon(0.0));
  EXPECT_TRUE(g.converged);
  EXPECT_EQ(g.delta_m, 0.0);
}

TEST_F(EvaluationTest, GapCloseFromANominalSampleRecoversTheRemainingPropellant) {
  // Principle of optimality: the tail of the nominal is optimal from any of
  // its states, so the correction must cost what the nominal still burns.
  const ShootingUnknowns u = testing::frozen_nominal_unknowns();
  const SampledTrajectory traj = propagate_sampled(
      initial_state(u, *problem_), 0.0, u.tf, 21, *thrust_);
  const std::size_t i = 19;
  const AugmentedState& s = traj.states[i];
  GapCloseConfig cfg;
  cfg.tf_guesses = {u.tf - traj.times[i]};
  cfg.restarts = 0;
  const GapCloseResult g = gap_close(s.x, s.m, problem_->target,
                                     thrust_->with_epsilon(0.0), cfg,
                                     {s.costate});
  ASSERT_TRUE(g.converged) << g.message;
  EXPECT_NEAR(g.delta_m, s.m - nominal_->terminal.m, 1e-6);
  ASSERT_TRUE(g.unknowns.has_value());
  EXPECT_NEAR(g.unknowns->tf, u.tf - traj.times[i], 1e-4);
}

TEST_F(EvaluationTest, GapCloseReportsFailure) {
  GapCloseConfig cfg;
  cfg.restarts = 2;
  cfg.tf_guesses = {1e-3};
  cfg.solver.max_iterations = 1;
  EquinoctialState x = problem_->x0;
  const GapCloseResult g =
      gap_close(x, 1.0, problem_->target, thrust_->with_epsilon(0.0), cfg);
  EXPECT_FALSE(g.converged);
  EXPECT_FALSE(g.message.empty());
  cfg.keep = 0;
  EXPECT_THROW(
      gap_close(x, 1.0, problem_->target, thrust_->with_epsilon(0.0), cfg),
      ConfigError);
}

}  // namespace
}  // namespace lowthrust
