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

#include <benchmark/benchmark.h>

#include "lowthrust/factory.hpp"
#include "lowthrust/shooting.hpp"
#include "test_support.hpp"

namespace {

using namespace lowthrust;

// Full nominal transfer at the smallest epsilon of the schedule.
void BM_PropagateNominal(benchmark::State& state) {
  const TransferProblem problem = testing::nominal_problem();
  const ShootingUnknowns u = testing::frozen_nominal_unknowns();
  const ThrustConfig th = testing::nominal_thrust(1e-6);
  const IntegratorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(terminal_state(u, problem, th, cfg));
  }
}
BENCHMARK(BM_PropagateNominal)->Unit(benchmark::kMillisecond);

void BM_ShootingJacobian(benchmark::State& state) {
  const TransferProblem problem = testing::nominal_problem();
  const ShootingUnknowns u = testing::frozen_first_unknowns();
  const ThrustConfig th = testing::nominal_thrust(0.1);
  const SolverConfig cfg;
  const ShootingResidual r0 = shoot(u, problem, th, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(shooting_jacobian(u, r0, problem, th, cfg));
  }
}
BENCHMARK(BM_ShootingJacobian)->Unit(benchmark::kMillisecond);

// One backward-generated dataset trajectory of 100 samples.
void BM_GenerateTrajectory(benchmark::State& state) {
  const TransferProblem problem = testing::nominal_problem();
  const ThrustConfig th = testing::nominal_thrust(1e-6);
  const IntegratorConfig cfg;
  const NominalTerminal nominal = nominal_terminal(
      problem, testing::frozen_nominal_unknowns(), th, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        generate_trajectory(nominal.terminal, nominal.tf, 100, th, cfg, 0));
  }
}
BENCHMARK(BM_GenerateTrajectory)->Unit(benchmark::kMillisecond);

}  // namespace
