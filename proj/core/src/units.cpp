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

#include "lowthrust/units.hpp"

#include <cmath>
#include <string>

#include "lowthrust/errors.hpp"

namespace lowthrust {

Units make_units(double mass_unit_kg) {
  Units u;
  u.mass_kg = mass_unit_kg;
  u.time_s = std::sqrt(constants::kAu * constants::kAu * constants::kAu /
                       constants::kMuSun);
  return u;
}

ThrustConfig make_thrust_config(const MissionParameters& mission,
                                double epsilon) {
  if (!(mission.m0_kg > 0.0)) throw ConfigError("mission.m0_kg must be > 0");
  if (!(mission.isp_s > 0.0)) throw ConfigError("mission.isp_s must be > 0");
  if (!(mission.max_thrust_n > 0.0)) {
    throw ConfigError("mission.max_thrust_n must be > 0");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in [0, 1], got " +
                      std::to_string(epsilon));
  }
  const Units units = make_units(mission.m0_kg);
  const double tu = units.time_s;
  ThrustConfig cfg;
  cfg.c1 = mission.max_thrust_n * tu * tu / (mission.m0_kg * constants::kAu);
  cfg.c2 = mission.max_thrust_n / (mission.isp_s * constants::kG0) * tu /
           mission.m0_kg;
  cfg.isp_s = mission.isp_s;
  cfg.epsilon = epsilon;
  return cfg;
}

}  // namespace lowthrust
