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

#ifndef LOWTHRUST_EPHEMERIS_HPP_
#define LOWTHRUST_EPHEMERIS_HPP_

#include <string>
#include <string_view>

#include "lowthrust/dynamics.hpp"

namespace lowthrust {

// Days since 2000-01-01 00:00.
struct Epoch {
  double mjd2000 = 0.0;
};

// Throws DomainError on an invalid Gregorian date.
Epoch epoch_from_date(int year, int month, int day);
// Parses YYYY-MM-DD.
Epoch epoch_from_string(std::string_view iso_date);

enum class Planet { kEarth, kVenus };

Planet planet_from_string(std::string_view name);
std::string to_string(Planet planet);

// Osculating heliocentric ecliptic elements at an epoch. Lengths in AU,
// angles in radians.
struct KeplerianElements {
  double a = 1.0;
  double e = 0.0;
  double i = 0.0;
  double raan = 0.0;
  double argp = 0.0;
  double mean_anomaly = 0.0;
};

// Evaluates the approximate-ephemeris element table (J2000 values plus
// linear rates per Julian century, valid 1800-2050).
KeplerianElements planet_elements(Planet planet, Epoch epoch);

// Solves E - e sin E = M with Newton iterations; |residual| < 1e-13.
// Throws ConvergenceError after a bounded number of iterations.
double solve_kepler(double mean_anomaly, double e);

EquinoctialState keplerian_to_equinoctial(const KeplerianElements& el);
CartesianState keplerian_to_cartesian(const KeplerianElements& el,
                                      double mu = constants::kMu);

struct PlanetState {
  CartesianState cartesian;  // AU and AU/TU (mu = 1)
  EquinoctialState elements;
  KeplerianElements keplerian;
};

PlanetState planet_state(Planet planet, Epoch epoch);

}  // namespace lowthrust

#endif  // LOWTHRUST_EPHEMERIS_HPP_
