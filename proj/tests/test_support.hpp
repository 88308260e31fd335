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

#ifndef LOWTHRUST_TESTS_TEST_SUPPORT_HPP_
#define LOWTHRUST_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <numbers>
#include <random>

#include "lowthrust/ephemeris.hpp"
#include "lowthrust/pmp.hpp"
#include "lowthrust/shooting.hpp"

namespace lowthrust::testing {

// Nominal chain endpoints, 17 significant digits.
inline constexpr double kFrozenFirstLambda0[6] = {13.305150659560756, -2.4056965708192157, 1.6415036983074405, -10.091592159823662, -34.523393141118575, 0.024841232205950126};
inline constexpr double kFrozenFirstLambdaM0 = 6.1822086484320566;
inline constexpr double kFrozenFirstTf = 8.6115931585511181;
inline constexpr double kFrozenLambda0[6] = {11.809484806354433, -0.075832939474285016, 0.17426688657909903, -6.4545085436423815, -23.425054705229513, 0.024028468435491539};
inline constexpr double kFrozenLambdaM0 = 5.3985073609202008;
inline constexpr double kFrozenTf = 8.7407222820379378;

inline EquinoctialState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> p(0.5, 1.5);
  std::uniform_real_distribution<double> small(-0.2, 0.2);
  std::uniform_real_distribution<double> angle(0.0, 4.0 * std::numbers::pi);
  return {p(rng), small(rng), small(rng), small(rng), small(rng), angle(rng)};
}

inline AugmentedState random_augmented(std::mt19937_64& rng,
                                       double costate_bound = 10.0) {
  std::uniform_real_distribution<double> mass(0.6, 1.0);
  std::uniform_real_distribution<double> lam(-costate_bound, costate_bound);
  AugmentedState aug;
  aug.x = random_state(rng);
  aug.m = mass(rng);
  for (int i = 0; i < 6; ++i) aug.costate.lambda[i] = lam(rng);
  aug.costate.lambda_m = lam(rng);
  return aug;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 d(n(rng), n(rng), n(rng));
  return d.normalized();
}

inline ThrustConfig nominal_thrust(double epsilon) {
  return make_thrust_config(MissionParameters{}, epsilon);
}

inline TransferProblem nominal_problem() {
  const Epoch launch = epoch_from_date(2005, 5, 7);
  const PlanetState earth = planet_state(Planet::kEarth, launch);
  TransferProblem problem;
  problem.x0 = from_cartesian(earth.cartesian.r, earth.cartesian.v);
  problem.m0 = 1.0;
  problem.target = planet_state(Planet::kVenus, launch).elements;
  return problem;
}

// Converged nominal unknowns at epsilon = 1e-6 for nominal_problem(),
// produced by the random-restart continuation and frozen here so tests do not
// have to repeat the search.
inline ShootingUnknowns frozen_nominal_unknowns() {
  ShootingUnknowns u;
  u.lambda0 = Eigen::Map<const Vec6>(kFrozenLambda0);
  u.lambda_m0 = kFrozenLambdaM0;
  u.tf = kFrozenTf;
  return u;
}

// Same chain at epsilon = 0.1, the starting point of the continuation.
inline ShootingUnknowns frozen_first_unknowns() {
  ShootingUnknowns u;
  u.lambda0 = Eigen::Map<const Vec6>(kFrozenFirstLambda0);
  u.lambda_m0 = kFrozenFirstLambdaM0;
  u.tf = kFrozenFirstTf;
  return u;
}

inline double max_rel_error(const Eigen::MatrixXd& got,
                            const Eigen::MatrixXd& want) {
  const double scale = want.cwiseAbs().maxCoeff();
  const double diff = (got - want).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace lowthrust::testing

#endif  // LOWTHRUST_TESTS_TEST_SUPPORT_HPP_
