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

namespace lowthrust {
namespace {

IntegratorConfig effective_config(const IntegratorConfig& cfg,
                                  const ThrustConfig& thrust, double span) {
  IntegratorConfig out = cfg;
  // Near bang-bang throttles switch within a few epsilon of SF = 0; a capped
  // step keeps the controller from stepping over a whole switching arc.
  if (out.max_step <= 0.0 && thrust.epsilon <= 1e-5) {
    out.max_step = span / 500.0;
  }
  return out;
}

}  // namespace

std::vector<double> sample_times(double t0, double t1, std::size_t n_samples) {
  if (n_samples < 2) throw DomainError("need at least two samples");
  std::vector<double> times(n_samples);
  const double dt = (t1 - t0) / static_cast<double>(n_samples - 1);
  for (std::size_t i = 0; i < n_samples; ++i) {
    times[i] = t0 + static_cast<double>(i) * dt;
  }
  times.back() = t1;
  return times;
}

AugmentedState propagate(const AugmentedState& aug0, double t0, double t1,
                         const ThrustConfig& thrust,
                         const IntegratorConfig& cfg, IntegratorStats* stats) {
  if (t0 == t1) throw DomainError("propagate requires t0 != t1");
  Dop853<14> stepper(effective_config(cfg, thrust, std::abs(t1 - t0)));
  Vec14 y = aug0.pack();
  auto rhs = [&thrust](double, const Vec14& s) {
    return augmented_rhs(s, thrust);
  };
  stepper.advance(rhs, y, t0, t1);
  if (stats != nullptr) *stats = stepper.stats();
  return AugmentedState::unpack(y);
}

SampledTrajectory propagate_sampled(const AugmentedState& aug0, double t0,
                                    double t1, std::size_t n_samples,
                                    const ThrustConfig& thrust,
                                    const IntegratorConfig& cfg,
                                    IntegratorStats* stats) {
  if (t0 == t1) throw DomainError("propagate requires t0 != t1");
  SampledTrajectory out;
  out.times = sample_times(t0, t1, n_samples);
  Dop853<14> stepper(effective_config(cfg, thrust, std::abs(t1 - t0)));
  auto rhs = [&thrust](double, const Vec14& s) {
    return augmented_rhs(s, thrust);
  };
  Vec14 y = aug0.pack();
  out.states.reserve(n_samples);
  out.controls.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (i > 0) stepper.advance(rhs, y, out.times[i - 1], out.times[i]);
    out.states.push_back(AugmentedState::unpack(y));
    out.controls.push_back(optimal_control(out.states.back(), thrust));
  }
  if (stats != nullptr) *stats = stepper.stats();
  return out;
}

}  // namespace lowthrust
