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

#ifndef LOWTHRUST_PMP_HPP_
#define LOWTHRUST_PMP_HPP_

#include "lowthrust/dynamics.hpp"

namespace lowthrust {

// Co-states conjugate to (p, f, g, h, k, L) and to the mass.
struct Costate {
  Vec6 lambda = Vec6::Zero();
  double lambda_m = 0.0;
};

// State, mass and co-states. Packed layout for integration is
// [p f g h k L | m | lambda_p .. lambda_L | lambda_m].
struct AugmentedState {
  EquinoctialState x;
  double m = 1.0;
  Costate costate;

  [[nodiscard]] Vec14 pack() const;
  static AugmentedState unpack(const Vec14& y);
};

// |B^T lambda| below this is treated as a singular thrust direction.
inline constexpr double kSingularDirectionNorm = 1e-14;

// SF = 1 - (c1/m)|B^T lambda| - c2 lambda_m.
double switching_function(const AugmentedState& aug, const ThrustConfig& cfg);

// -B^T lambda / |B^T lambda|. Throws SingularDirectionError when the norm is
// below kSingularDirectionNorm.
Vec3 optimal_direction(const AugmentedState& aug);

// Minimizer of u*SF - eps*log(u(1-u)) over (0, 1). For eps == 0 the
// bang-bang limit is returned with u = 0.5 at SF == 0.
double optimal_throttle(double switching, double epsilon);

// Closed-form minimizing control. On a singular direction the tangential
// direction (0, 1, 0) is used and the throttle follows SF = 1 - c2 lambda_m.
Control optimal_control(const AugmentedState& aug, const ThrustConfig& cfg);

double hamiltonian(const AugmentedState& aug, const Control& control,
                   const ThrustConfig& cfg);

struct CostateRates {
  Vec6 lambda_dot = Vec6::Zero();
  double lambda_m_dot = 0.0;
};

// -dH/d(x, m) with the control held fixed.
CostateRates costate_rhs(const AugmentedState& aug, const Control& control,
                         const ThrustConfig& cfg);

// State and co-state rates with the optimal control substituted.
Vec14 augmented_rhs(const AugmentedState& aug, const ThrustConfig& cfg);
Vec14 augmented_rhs(const Vec14& y, const ThrustConfig& cfg);

}  // namespace lowthrust

#endif  // LOWTHRUST_PMP_HPP_
