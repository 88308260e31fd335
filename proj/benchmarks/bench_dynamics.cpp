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

#include <random>

#include <benchmark/benchmark.h>

#include "lowthrust/dynamics.hpp"
#include "lowthrust/pmp.hpp"
#include "test_support.hpp"

namespace {

using namespace lowthrust;

void BM_EomRhs(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const EquinoctialState x = testing::random_state(rng);
  const ThrustConfig th = testing::nominal_thrust(1e-3);
  Control u;
  u.throttle = 0.7;
  u.direction = testing::random_unit(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eom_rhs(x, 0.9, u, th));
  }
}
BENCHMARK(BM_EomRhs);

void BM_BPartials(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const EquinoctialState x = testing::random_state(rng);
  for (auto _ : state) benchmark::DoNotOptimize(b_partials(x));
}
BENCHMARK(BM_BPartials);

void BM_AugmentedRhs(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const AugmentedState aug = testing::random_augmented(rng);
  const ThrustConfig th = testing::nominal_thrust(1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(augmented_rhs(aug, th));
}
BENCHMARK(BM_AugmentedRhs);

}  // namespace
