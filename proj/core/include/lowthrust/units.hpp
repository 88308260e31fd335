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

#ifndef LOWTHRUST_UNITS_HPP_
#define LOWTHRUST_UNITS_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lowthrust {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Vec14 = Eigen::Matrix<double, 14, 1>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

namespace constants {
inline constexpr double kAu = 1.49597870691e11;          // m
inline constexpr double kMuSun = 1.32712440018e20;       // m^3/s^2
inline constexpr double kG0 = 9.80665;                   // m/s^2
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerYear = 365.25;
inline constexpr double kSecondsPerYear = kSecondsPerDay * kDaysPerYear;
// Gravity parameter in scaled units.
inline constexpr double kMu = 1.0;
}  // namespace constants

// Scaling between SI and the nondimensional system (AU, m0, TU with mu = 1).
struct Units {
  double length_m = constants::kAu;
  double mass_kg = 1500.0;
  double time_s = 0.0;  // filled by make_units

  [[nodiscard]] double velocity_mps() const { return length_m / time_s; }
  [[nodiscard]] double years(double t_nd) const {
    return t_nd * time_s / constants::kSecondsPerYear;
  }
  [[nodiscard]] double from_years(double years) const {
    return years * constants::kSecondsPerYear / time_s;
  }
  [[nodiscard]] double kg(double m_nd) const { return m_nd * mass_kg; }
};

// TU = sqrt(AU^3 / GM_sun).
Units make_units(double mass_unit_kg);

// Physical spacecraft parameters.
struct MissionParameters {
  double m0_kg = 1500.0;
  double isp_s = 3800.0;
  double max_thrust_n = 0.3;
};

// Nondimensional thrust constants of the equations of motion together with
// the homotopy parameter epsilon.
struct ThrustConfig {
  double c1 = 0.0;       // max thrust
  double c2 = 0.0;       // mass flow at full throttle
  double isp_s = 0.0;    // documentation only
  double epsilon = 0.0;  // log-barrier weight, in [0, 1]

  [[nodiscard]] ThrustConfig with_epsilon(double eps) const {
    ThrustConfig out = *this;
    out.epsilon = eps;
    return out;
  }
};

// c1 = T TU^2 / (m0 AU), c2 = (T / (Isp g0)) TU / m0. Throws ConfigError on
// non-positive parameters.
ThrustConfig make_thrust_config(const MissionParameters& mission,
                                double epsilon);

}  // namespace lowthrust

#endif  // LOWTHRUST_UNITS_HPP_
