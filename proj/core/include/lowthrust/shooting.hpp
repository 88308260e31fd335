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

#ifndef LOWTHRUST_SHOOTING_HPP_
#define LOWTHRUST_SHOOTING_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "lowthrust/integrator.hpp"

namespace lowthrust {

using Vec8 = Eigen::Matrix<double, 8, 1>;

// Initial co-states and transfer time.
struct ShootingUnknowns {
  Vec6 lambda0 = Vec6::Zero();
  double lambda_m0 = 0.0;
  double tf = 0.0;

  [[nodiscard]] Vec8 to_vector() const;
  static ShootingUnknowns from_vector(const Vec8& v);
};

// [p-pV, f-fV, g-gV, h-hV, k-kV, lambda_L, lambda_m, H] at tf.
using ShootingResidual = Vec8;

// Orbit transfer from (x0, m0) to the orbit of `target` (L free).
struct TransferProblem {
  EquinoctialState x0;
  double m0 = 1.0;
  EquinoctialState target;
};

struct SolverConfig {
  double tolerance = 1e-8;       // on the max-norm of the residual
  int max_iterations = 60;       // Jacobian evaluations
  double fd_step = 1e-7;         // relative forward-difference step
  double failure_residual = 1e3;  // sentinel on propagation failure
  // Hold tf at its guess and drop the transversality row H(tf) = 0.
  bool fixed_time = false;
  IntegratorConfig integrator;
};

// Propagates the augmented system over [0, tf] and evaluates the terminal
// conditions. Propagation failures (or tf <= 0) map to a residual whose
// components all equal cfg.failure_residual.
ShootingResidual shoot(const ShootingUnknowns& unknowns,
                       const TransferProblem& problem,
                       const ThrustConfig& thrust, const SolverConfig& cfg);

// Terminal augmented state for the given unknowns.
AugmentedState terminal_state(const ShootingUnknowns& unknowns,
                              const TransferProblem& problem,
                              const ThrustConfig& thrust,
                              const IntegratorConfig& cfg);

AugmentedState initial_state(const ShootingUnknowns& unknowns,
                             const TransferProblem& problem);

struct SolveResult {
  ShootingUnknowns unknowns;
  ShootingResidual residual = ShootingResidual::Zero();
  double residual_norm = 0.0;  // max-norm
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Levenberg-Marquardt on the 8x8 shooting system with a forward-difference
// Jacobian, falling back to a line-searched Newton iteration.
SolveResult solve(const ShootingUnknowns& guess, const TransferProblem& problem,
                  const ThrustConfig& thrust, const SolverConfig& cfg);

// Forward-difference Jacobian of shoot() at `at`.
Eigen::Matrix<double, 8, 8> shooting_jacobian(const ShootingUnknowns& at,
                                              const ShootingResidual& r0,
                                              const TransferProblem& problem,
                                              const ThrustConfig& thrust,
                                              const SolverConfig& cfg);

// 0.1, 0.05, 0.02, ... , 1e-6.
std::vector<double> default_schedule();
// Throws DomainError unless strictly decreasing and positive.
void validate_schedule(const std::vector<double>& schedule);

struct ContinuationStep {
  double epsilon = 0.0;
  ShootingUnknowns unknowns;
  double residual_norm = 0.0;
  int iterations = 0;
  double final_mass = 0.0;
};

struct ContinuationResult {
  std::vector<ContinuationStep> chain;
  bool completed = false;
  std::optional<double> failed_epsilon;
  // Unknowns at the last successful epsilon.
  [[nodiscard]] const ShootingUnknowns& unknowns() const {
    return chain.back().unknowns;
  }
};

// Warm-started solves along the schedule starting from `start`, which must
// solve (or nearly solve) the problem at schedule.front(). Stops at the first
// failing epsilon and reports it.
ContinuationResult continuation(const ShootingUnknowns& start,
                                const TransferProblem& problem,
                                const ThrustConfig& thrust,
                                const std::vector<double>& schedule,
                                const SolverConfig& cfg);

struct RestartConfig {
  int restarts = 100;
  double costate_bound = 10.0;  // co-states drawn uniformly in [-b, b]
  double tf_guess = 0.0;        // nondimensional
  std::uint64_t seed = 0;
  int keep = 4;  // converged restarts carried through the full continuation
  int threads = 1;
};

// Random co-state guess for restart `index`, a deterministic function of
// (seed, index).
ShootingUnknowns random_guess(const RestartConfig& cfg, int index);

struct NominalSolution {
  TransferProblem problem;
  ShootingUnknowns unknowns;
  ContinuationResult continuation;
  int restart_index = -1;
  int restarts_tried = 0;
  int restarts_converged = 0;
  [[nodiscard]] double final_mass(const ThrustConfig& thrust,
                                  const IntegratorConfig& cfg) const;
};

// Random restarts at schedule.front(); the first `keep` converged restarts
// (by index) are continued down the schedule and the completed chain with
// the largest final mass wins, ties broken by restart index. Throws
// ConvergenceError when no chain completes.
NominalSolution solve_with_restarts(const TransferProblem& problem,
                                    const ThrustConfig& thrust,
                                    const std::vector<double>& schedule,
                                    const SolverConfig& cfg,
                                    const RestartConfig& restarts);

}  // namespace lowthrust

#endif  // LOWTHRUST_SHOOTING_HPP_
