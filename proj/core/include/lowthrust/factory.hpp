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

#ifndef LOWTHRUST_FACTORY_HPP_
#define LOWTHRUST_FACTORY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "lowthrust/integrator.hpp"
#include "lowthrust/pmp.hpp"
#include "lowthrust/shooting.hpp"

namespace lowthrust {

struct PerturbationConfig {
  double rho = 0.1;    // radius of the co-state ball
  double rho_l = 0.1;  // half-width of the terminal longitude shift, rad
  std::int64_t n_trajectories = 1000;
  std::size_t n_samples = 100;
  std::uint64_t seed = 0;
  // Terminal-mass root bracket as factors of the nominal final mass.
  double mass_lo = 0.3;
  double mass_hi = 1.2;
  double epsilon = 1e-6;
  int threads = 1;
  IntegratorConfig integrator;
};

void validate(const PerturbationConfig& cfg);

// Arrival point of the nominal transfer, with the orbit elements set to the
// target's and lambda_L = lambda_m = 0 exactly.
struct NominalTerminal {
  AugmentedState terminal;
  double tf = 0.0;
};

NominalTerminal nominal_terminal(const TransferProblem& problem,
                                 const ShootingUnknowns& unknowns,
                                 const ThrustConfig& thrust,
                                 const IntegratorConfig& cfg = {});

// Uniform draw in the 5-ball of radius rho over (lambda_p .. lambda_k).
// lambda_L and lambda_m are copied unchanged.
Costate perturb_terminal_costates(const Costate& nominal, double rho,
                                  std::mt19937_64& rng);

struct RestoredTerminal {
  double m = 0.0;
  double L = 0.0;
};

// Shifts L by delta_l and solves H = 0 for the terminal mass inside
// [mass_lo, mass_hi] * m_f. Empty if the bracket holds no root.
std::optional<RestoredTerminal> restore_hamiltonian(
    const EquinoctialState& x_f, double m_f, const Costate& costate,
    const ThrustConfig& thrust, double delta_l, double mass_lo = 0.3,
    double mass_hi = 1.2);

struct TrajectorySample {
  std::int64_t trajectory_id = 0;
  std::int64_t sample_index = 0;
  double time_to_go = 0.0;
  EquinoctialState x;
  double m = 0.0;
  Costate costate;
  double throttle = 0.0;
  Vec3 direction = Vec3::UnitY();
  double value = 0.0;             // (m - m_f) / c2
  double propellant_to_go = 0.0;  // m - m_f

  [[nodiscard]] AugmentedState augmented() const {
    return {x, m, costate};
  }
};

using Trajectory = std::vector<TrajectorySample>;

// Integrates backward from the terminal point over tf and returns n_samples
// equi-spaced samples ordered forward in time (index 0 is the departure).
Trajectory generate_trajectory(const AugmentedState& terminal, double tf,
                               std::size_t n_samples,
                               const ThrustConfig& thrust,
                               const IntegratorConfig& cfg,
                               std::int64_t trajectory_id);

struct FactoryStats {
  std::int64_t attempted = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected_root = 0;
  std::int64_t rejected_propagation = 0;
  double wall_seconds = 0.0;

  [[nodiscard]] double acceptance_rate() const {
    return attempted > 0 ? static_cast<double>(accepted) /
                               static_cast<double>(attempted)
                         : 0.0;
  }
  [[nodiscard]] double trajectories_per_second() const {
    return wall_seconds > 0.0 ? static_cast<double>(accepted) / wall_seconds
                              : 0.0;
  }
};

// Called once per accepted trajectory, in increasing trajectory_id order.
using TrajectorySink = std::function<void(Trajectory&&)>;

// Perturbation i draws from a generator seeded with (seed, i), so the output
// does not depend on cfg.threads. Trajectory ids are perturbation indices.
FactoryStats run_factory(const NominalTerminal& nominal,
                         const ThrustConfig& thrust,
                         const PerturbationConfig& cfg,
                         const TrajectorySink& sink);

std::mt19937_64 perturbation_rng(std::uint64_t seed, std::int64_t index);

}  // namespace lowthrust

#endif  // LOWTHRUST_FACTORY_HPP_
