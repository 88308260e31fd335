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

#include "lowthrust/integrator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lowthrust/errors.hpp"
#include "test_support.hpp"

namespace lowthrust {
namespace {

using Vec2 = Eigen::Matrix<double, 2, 1>;

TEST(Dop853, HarmonicOscillatorFullPeriod) {
  Dop853<2> stepper(IntegratorConfig{});
  Vec2 y(1.0, 0.0);
  stepper.advance([](double, const Vec2& s) { return Vec2(s[1], -s[0]); }, y,
                  0.0, 2.0 * std::numbers::pi);
  EXPECT_NEAR(y[0], 1.0, 1e-11);
  EXPECT_NEAR(y[1], 0.0, 1e-11);
  EXPECT_GT(stepper.stats().accepted, 0u);
}

TEST(Dop853, ExponentialDecayBackward) {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-12;
  Dop853<1> stepper(cfg);
  Eigen::Matrix<double, 1, 1> y;
  y << std::exp(-3.0);
  stepper.advance(
      [](double, const Eigen::Matrix<double, 1, 1>& s) { return (-s).eval(); },
      y, 3.0, 0.0);
  EXPECT_NEAR(y[0], 1.0, 1e-11);
}

TEST(Dop853, RespectsStepBudget) {
  IntegratorConfig cfg;
  cfg.max_steps = 3;
  Dop853<2> stepper(cfg);
  Vec2 y(1.0, 0.0);
  EXPECT_THROW(stepper.advance(
                   [](double, const Vec2& s) { return Vec2(s[1], -s[0]); }, y,
                   0.0, 100.0),
               PropagationError);
}

TEST(Dop853, InvalidInitialStateIsPropagationError) {
  Dop853<2> stepper(IntegratorConfig{});
  Vec2 y(std::nan(""), 0.0);
  EXPECT_THROW(stepper.advance([](double, const Vec2& s) { return s; }, y, 0.0,
                               1.0),
               PropagationError);
}

TEST(Dop853, RejectsBadTolerances) {
  IntegratorConfig cfg;
  cfg.rel_tol = 0.0;
  EXPECT_THROW(Dop853<2>{cfg}, DomainError);
}

AugmentedState coasting(const EquinoctialState& x) {
  AugmentedState aug;
  aug.x = x;
  aug.m = 1.0;
  // SF > 0 with epsilon = 0 switches the engine off.
  aug.costate.lambda_m = -1.0;
  return aug;
}

TEST(Propagate, KeplerOrbitClosesAfterOnePeriod) {
  const ThrustConfig cfg = testing::nominal_thrust(0.0);
  const EquinoctialState x0{1.0, 0.1, -0.05, 0.02, 0.01, 0.0};
  const double a = x0.p / (1.0 - x0.f * x0.f - x0.g * x0.g);
  const double period = 2.0 * std::numbers::pi * std::pow(a, 1.5);
  const AugmentedState end = propagate(coasting(x0), 0.0, period, cfg);
  const CartesianState c0 = to_cartesian(x0);
  const CartesianState c1 = to_cartesian(end.x);
  EXPECT_LT((c1.r - c0.r).norm(), 1e-10);
  EXPECT_LT((c1.v - c0.v).norm(), 1e-10);
  EXPECT_NEAR(end.x.L - x0.L, 2.0 * std::numbers::pi, 1e-10);
}

TEST(Propagate, ForwardBackwardRoundTrip) {
  const AugmentedState start =
      initial_state(testing::frozen_nominal_unknowns(), testing::nominal_problem());
  for (double eps : {0.1, 1e-3}) {
    const ThrustConfig cfg = testing::nominal_thrust(eps);
    const AugmentedState end = propagate(start, 0.0, 3.0, cfg);
    const AugmentedState back = propagate(end, 3.0, 0.0, cfg);
    EXPECT_LT((back.pack() - start.pack()).cwiseAbs().maxCoeff(), 1e-8)
        << "eps=" << eps;
  }
}

TEST(Propagate, HamiltonianConservedAlongNominal) {
  const TransferProblem problem = testing::nominal_problem();
  const ShootingUnknowns unknowns = testing::frozen_nominal_unknowns();
  const ThrustConfig cfg = testing::nominal_thrust(1e-6);
  const SampledTrajectory traj = propagate_sampled(
      initial_state(unknowns, problem), 0.0, unknowns.tf, 200, cfg);
  const double h0 = hamiltonian(traj.states.front(), traj.controls.front(), cfg);
  double drift = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    drift = std::max(
        drift, std::abs(hamiltonian(traj.states[i], traj.controls[i], cfg) - h0));
  }
  EXPECT_LT(drift, 1e-9);
}

TEST(PropagateSampled, EndpointsAndMonotoneMass) {
  const TransferProblem problem = testing::nominal_problem();
  const ShootingUnknowns unknowns = testing::frozen_first_unknowns();
  const ThrustConfig cfg = testing::nominal_thrust(0.1);
  const AugmentedState start = initial_state(unknowns, problem);
  const SampledTrajectory traj =
      propagate_sampled(start, 0.0, unknowns.tf, 101, cfg);
  ASSERT_EQ(traj.times.size(), 101u);
  ASSERT_EQ(traj.states.size(), 101u);
  ASSERT_EQ(traj.controls.size(), 101u);
  EXPECT_EQ(traj.times.front(), 0.0);
  EXPECT_EQ(traj.times.back(), unknowns.tf);
  EXPECT_EQ(traj.states.front().pack(), start.pack());
  const AugmentedState direct = propagate(start, 0.0, unknowns.tf, cfg);
  EXPECT_LT((traj.states.back().pack() - direct.pack()).cwiseAbs().maxCoeff(),
            1e-10);
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    EXPECT_LE(traj.states[i].m, traj.states[i - 1].m);
    EXPECT_GT(traj.times[i], traj.times[i - 1]);
  }
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Control want = optimal_control(traj.states[i], cfg);
    EXPECT_NEAR(traj.controls[i].throttle, want.throttle, 1e-12);
    EXPECT_LT((traj.controls[i].direction - want.direction).norm(), 1e-12);
  }
}

TEST(SampleTimes, ExactEndpointsAndSpacing) {
  const std::vector<double> t = sample_times(0.0, 8.7, 1000);
  ASSERT_EQ(t.size(), 1000u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t.back(), 8.7);
  EXPECT_NEAR(t[1] - t[0], 8.7 / 999.0, 1e-15);
  EXPECT_THROW(sample_times(0.0, 1.0, 1), DomainError);
}

}  // namespace
}  // namespace lowthrust
