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

#include "lowthrust/pmp.hpp"

#include <algorithm>
#include <cmath>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

constexpr double kLogClamp = 1e-16;

double barrier(double u, double epsilon) {
  if (epsilon == 0.0) return 0.0;
  const double uc = std::clamp(u, kLogClamp, 1.0 - kLogClamp);
  return -epsilon * std::log(uc * (1.0 - uc));
}

}  // namespace

Vec14 AugmentedState::pack() const {
  Vec14 y;
  y.head<6>() = x.to_vector();
  y[6] = m;
  y.segment<6>(7) = costate.lambda;
  y[13] = costate.lambda_m;
  return y;
}

AugmentedState AugmentedState::unpack(const Vec14& y) {
  AugmentedState aug;
  aug.x = EquinoctialState::from_vector(y.head<6>());
  aug.m = y[6];
  aug.costate.lambda = y.segment<6>(7);
  aug.costate.lambda_m = y[13];
  return aug;
}

double switching_function(const AugmentedState& aug, const ThrustConfig& cfg) {
  if (!(aug.m > 0.0)) throw DegenerateStateError("non-positive mass");
  const Vec3 btl = b_matrix(aug.x).transpose() * aug.costate.lambda;
  return 1.0 - cfg.c1 / aug.m * btl.norm() - cfg.c2 * aug.costate.lambda_m;
}

Vec3 optimal_direction(const AugmentedState& aug) {
  const Vec3 btl = b_matrix(aug.x).transpose() * aug.costate.lambda;
  const double n = btl.norm();
  if (n < kSingularDirectionNorm) {
    throw SingularDirectionError("|B^T lambda| vanished");
  }
  return -btl / n;
}

double optimal_throttle(double switching, double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  if (std::isnan(switching)) throw DomainError("switching function is NaN");
  if (epsilon == 0.0) {
    if (switching < 0.0) return 1.0;
    if (switching > 0.0) return 0.0;
    return 0.5;
  }
  const double root = std::hypot(2.0 * epsilon, switching);
  if (switching >= 0.0) {
    return 2.0 * epsilon / (2.0 * epsilon + switching + root);
  }
  // Same expression rearranged to avoid cancellation in SF + root.
  return (root - switching) / (root - switching + 2.0 * epsilon);
}

Control optimal_control(const AugmentedState& aug, const ThrustConfig& cfg) {
  if (!(aug.m > 0.0)) throw DegenerateStateError("non-positive mass");
  const Vec3 btl = b_matrix(aug.x).transpose() * aug.costate.lambda;
  const double n = btl.norm();
  Control c;
  if (n < kSingularDirectionNorm) {
    c.direction = Vec3(0.0, 1.0, 0.0);
    c.throttle = optimal_throttle(1.0 - cfg.c2 * aug.costate.lambda_m,
                                  cfg.epsilon);
    return c;
  }
  c.direction = -btl / n;
  c.throttle = optimal_throttle(
      1.0 - cfg.c1 / aug.m * n - cfg.c2 * aug.costate.lambda_m, cfg.epsilon);
  return c;
}

double hamiltonian(const AugmentedState& aug, const Control& control,
                   const ThrustConfig& cfg) {
  const double u = control.throttle;
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("throttle outside [0, 1]");
  if (!(aug.m > 0.0)) throw DegenerateStateError("non-positive mass");
  const Mat63 b = b_matrix(aug.x);
  const double drift = d_vector(aug.x)[5];
  const Costate& c = aug.costate;
  return cfg.c1 * u / aug.m * c.lambda.dot(b * control.direction) +
         c.lambda[5] * drift - cfg.c2 * c.lambda_m * u + u +
         barrier(u, cfg.epsilon);
}

CostateRates costate_rhs(const AugmentedState& aug, const Control& control,
                         const ThrustConfig& cfg) {
  if (!(aug.m > 0.0)) throw DegenerateStateError("non-positive mass");
  const BPartials db = b_partials(aug.x);
  const Vec6 dd = d_longitude_gradient(aug.x);
  const Vec6& lambda = aug.costate.lambda;
  const double thrust = cfg.c1 * control.throttle / aug.m;
  CostateRates rates;
  for (int j = 0; j < 6; ++j) {
    rates.lambda_dot[j] =
        -thrust * lambda.dot(db[j] * control.direction) - lambda[5] * dd[j];
  }
  rates.lambda_m_dot =
      thrust / aug.m * lambda.dot(b_matrix(aug.x) * control.direction);
  return rates;
}

Vec14 augmented_rhs(const AugmentedState& aug, const ThrustConfig& cfg) {
  const Control control = optimal_control(aug, cfg);
  const StateRates s = eom_rhs(aug.x, aug.m, control, cfg);
  const CostateRates c = costate_rhs(aug, control, cfg);
  Vec14 out;
  out.head<6>() = s.x_dot;
  out[6] = s.m_dot;
  out.segment<6>(7) = c.lambda_dot;
  out[13] = c.lambda_m_dot;
  return out;
}

Vec14 augmented_rhs(const Vec14& y, const ThrustConfig& cfg) {
  return augmented_rhs(AugmentedState::unpack(y), cfg);
}

}  // namespace lowthrust
