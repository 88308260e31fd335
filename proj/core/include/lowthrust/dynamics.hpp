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

#ifndef LOWTHRUST_DYNAMICS_HPP_
#define LOWTHRUST_DYNAMICS_HPP_

#include <array>

#include "lowthrust/units.hpp"

namespace lowthrust {

// Modified equinoctial elements. L is the true longitude and is kept
// unwrapped while propagating.
struct EquinoctialState {
  double p = 1.0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  double k = 0.0;
  double L = 0.0;

  [[nodiscard]] Vec6 to_vector() const { return {p, f, g, h, k, L}; }
  static EquinoctialState from_vector(const Vec6& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
  }
};

// Throttle u in [0, 1] and unit thrust direction in the radial / tangential /
// normal frame.
struct Control {
  double throttle = 0.0;
  Vec3 direction = Vec3(0.0, 1.0, 0.0);
};

struct Auxiliaries {
  double w = 1.0;   // 1 + f cos L + g sin L
  double s2 = 1.0;  // 1 + h^2 + k^2
};

Auxiliaries auxiliaries(const EquinoctialState& x);

// Throws DegenerateStateError unless p > 0 and w > 0.
void check_state(const EquinoctialState& x);

// B(x): maps the thrust acceleration (RTN) onto element rates.
Mat63 b_matrix(const EquinoctialState& x);
// D(x): Keplerian drift, only the L component is nonzero.
Vec6 d_vector(const EquinoctialState& x);

// dB/dp, dB/df, dB/dg, dB/dh, dB/dk, dB/dL in that order.
using BPartials = std::array<Mat63, 6>;
BPartials b_partials(const EquinoctialState& x);

// Gradient of the only nonzero entry of D, sqrt(mu/p^3) w^2, with respect to
// (p, f, g, h, k, L).
Vec6 d_longitude_gradient(const EquinoctialState& x);

struct StateRates {
  Vec6 x_dot = Vec6::Zero();
  double m_dot = 0.0;
};

// x' = (c1 u / m) B i + D, m' = -c2 u. Rejects non-unit directions (1e-12)
// and throttles outside [0, 1].
StateRates eom_rhs(const EquinoctialState& x, double m, const Control& control,
                   const ThrustConfig& cfg);

struct CartesianState {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

CartesianState to_cartesian(const EquinoctialState& x,
                            double mu = constants::kMu);
// Returns L wrapped to [0, 2pi). Throws DegenerateStateError for
// rectilinear, parabolic/hyperbolic or retrograde-equatorial input.
EquinoctialState from_cartesian(const Vec3& r, const Vec3& v,
                                double mu = constants::kMu);

// Wraps an angle to [0, 2pi).
double wrap_two_pi(double angle);

}  // namespace lowthrust

#endif  // LOWTHRUST_DYNAMICS_HPP_
