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

#include "lowthrust/neural.hpp"
#include "lowthrust/training.hpp"

namespace {

using namespace lowthrust;

Mlp model_for(Task task) { return make_model(task, default_hidden(task), 1); }

Matrix random_inputs(Eigen::Index batch) {
  Matrix x = Matrix::Random(7, batch);
  x.row(0).array() += 1.0;
  return x;
}

void BM_PolicyForward(benchmark::State& state) {
  const Mlp model = model_for(Task::kPolicy);
  const Matrix x = random_inputs(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PolicyForward)->Arg(1)->Arg(256);

void BM_PolicyLossGradient(benchmark::State& state) {
  const Mlp model = model_for(Task::kPolicy);
  const Matrix x = random_inputs(state.range(0));
  const Matrix y = Matrix::Constant(4, state.range(0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(loss_policy(model, x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PolicyLossGradient)->Arg(256);

void BM_ValueInputGradient(benchmark::State& state) {
  const Mlp model = model_for(Task::kValue);
  const Vector x = random_inputs(1).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(model.input_gradient_one(x));
}
BENCHMARK(BM_ValueInputGradient);

// Double backpropagation through the input gradient.
void BM_ValueGradientLoss(benchmark::State& state) {
  const Mlp model = model_for(Task::kValueGradient);
  const Matrix x = random_inputs(state.range(0));
  const Matrix v = Matrix::Constant(1, state.range(0), 1.0);
  const Matrix g = Matrix::Random(7, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_value_gradient(model, x, v, g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ValueGradientLoss)->Arg(256);

}  // namespace
