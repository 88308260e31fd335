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

#include "lowthrust/shooting.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <random>

#include "lowthrust/errors.hpp"
#include "parallel.hpp"

namespace lowthrust {
namespace {

ShootingResidual failure(const SolverConfig& cfg) {
  return ShootingResidual::Constant(cfg.failure_residual);
}

double sq_norm(const ShootingResidual& r) { return r.squaredNorm(); }

}  // namespace

Vec8 ShootingUnknowns::to_vector() const {
  Vec8 v;
  v.head<6>() = lambda0;
  v[6] = lambda_m0;
  v[7] = tf;
  return v;
}

ShootingUnknowns ShootingUnknowns::from_vector(const Vec8& v) {
  ShootingUnknowns u;
  u.lambda0 = v.head<6>();
  u.lambda_m0 = v[6];
  u.tf = v[7];
  return u;
}

AugmentedState initial_state(const ShootingUnknowns& unknowns,
                             const TransferProblem& problem) {
  AugmentedState aug;
  aug.x = problem.x0;
  aug.m = problem.m0;
  aug.costate.lambda = unknowns.lambda0;
  aug.costate.lambda_m = unknowns.lambda_m0;
  return aug;
}

AugmentedState terminal_state(const ShootingUnknowns& unknowns,
                              const TransferProblem& problem,
                              const ThrustConfig& thrust,
                              const IntegratorConfig& cfg) {
  return propagate(initial_state(unknowns, problem), 0.0, unknowns.tf, thrust,
                   cfg);
}

ShootingResidual shoot(const ShootingUnknowns& unknowns,
                       const TransferProblem& problem,
                       const ThrustConfig& thrust, const SolverConfig& cfg) {
  if (!(unknowns.tf > 0.0) || !unknowns.to_vector().allFinite()) {
    return failure(cfg);
  }
  try {
    const AugmentedState end =
        terminal_state(unknowns, problem, thrust, cfg.integrator);
    ShootingResidual r;
    r[0] = end.x.p - problem.target.p;
    r[1] = end.x.f - problem.target.f;
    r[2] = end.x.g - problem.target.g;
    r[3] = end.x.h - problem.target.h;
    r[4] = end.x.k - problem.target.k;
    r[5] = end.costate.lambda[5];
    r[6] = end.costate.lambda_m;
    r[7] = cfg.fixed_time
               ? 0.0
               : hamiltonian(end, optimal_control(end, thrust), thrust);
    if (!r.allFinite()) return failure(cfg);
    return r;
  } catch (const Error&) {
    return failure(cfg);
  }
}

Eigen::Matrix<double, 8, 8> shooting_jacobian(const ShootingUnknowns& at,
                                              const ShootingResidual& r0,
                                              const TransferProblem& problem,
                                              const ThrustConfig& thrust,
                                              const SolverConfig& cfg) {
  const Vec8 x = at.to_vector();
  Eigen::Matrix<double, 8, 8> jac;
  if (cfg.fixed_time) {
    // Identity on tf keeps the normal equations regular and the step at 0.
    jac.col(7).setZero();
    jac(7, 7) = 1.0;
  }
  for (int j = 0; j < (cfg.fixed_time ? 7 : 8); ++j) {
    Vec8 xp = x;
    const double step = cfg.fd_step * std::max(1.0, std::abs(x[j]));
    xp[j] += step;
    jac.col(j) =
        (shoot(ShootingUnknowns::from_vector(xp), problem, thrust, cfg) - r0) /
        (xp[j] - x[j]);
  }
  return jac;
}

SolveResult solve(const ShootingUnknowns& guess, const TransferProblem& problem,
                  const ThrustConfig& thrust, const SolverConfig& cfg) {
  SolveResult out;
  Vec8 x = guess.to_vector();
  ShootingResidual r = shoot(guess, problem, thrust, cfg);
  ++out.evaluations;
  const bool start_failed = (r.array() == cfg.failure_residual).all();
  double damping = 1e-3;

  auto finish = [&](bool converged) {
    out.unknowns = ShootingUnknowns::from_vector(x);
    out.residual = r;
    out.residual_norm = r.lpNorm<Eigen::Infinity>();
    out.converged = converged;
    return out;
  };
  if (start_failed) return finish(false);

  Eigen::Matrix<double, 8, 8> jac;
  bool stalled = false;
  while (out.iterations < cfg.max_iterations) {
    if (r.lpNorm<Eigen::Infinity>() < cfg.tolerance) return finish(true);
    jac = shooting_jacobian(ShootingUnknowns::from_vector(x), r, problem,
                            thrust, cfg);
    out.evaluations += cfg.fixed_time ? 7 : 8;
    ++out.iterations;
    const Eigen::Matrix<double, 8, 8> a = jac.transpose() * jac;
    const Vec8 grad = jac.transpose() * r;
    const double diag_floor = 1e-12 * a.diagonal().maxCoeff();
    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::Matrix<double, 8, 8> m = a;
      for (int i = 0; i < 8; ++i) {
        m(i, i) += damping * std::max(a(i, i), diag_floor);
      }
      const Vec8 delta = -m.ldlt().solve(grad);
      const Vec8 xn = x + delta;
      if (!delta.allFinite() || !(xn[7] > 0.0)) {
        damping *= 10.0;
        continue;
      }
      const ShootingResidual rn =
          shoot(ShootingUnknowns::from_vector(xn), problem, thrust, cfg);
      ++out.evaluations;
      if (sq_norm(rn) < sq_norm(r)) {
        x = xn;
        r = rn;
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        break;
      }
      damping *= 10.0;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
  }
  if (r.lpNorm<Eigen::Infinity>() < cfg.tolerance) return finish(true);
  if (!stalled) return finish(false);

  // Newton with backtracking from the best LM iterate.
  for (int iter = 0; iter < 8; ++iter) {
    const Vec8 delta = -jac.partialPivLu().solve(r);
    if (!delta.allFinite()) break;
    bool accepted = false;
    for (double alpha = 1.0; alpha > 1e-3; alpha *= 0.5) {
      const Vec8 xn = x + alpha * delta;
      if (!(xn[7] > 0.0)) continue;
      const ShootingResidual rn =
          shoot(ShootingUnknowns::from_vector(xn), problem, thrust, cfg);
      ++out.evaluations;
      if (sq_norm(rn) < sq_norm(r)) {
        x = xn;
        r = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if (r.lpNorm<Eigen::Infinity>() < cfg.tolerance) return finish(true);
    jac = shooting_jacobian(ShootingUnknowns::from_vector(x), r, problem,
                            thrust, cfg);
    out.evaluations += cfg.fixed_time ? 7 : 8;
    ++out.iterations;
  }
  return finish(r.lpNorm<Eigen::Infinity>() < cfg.tolerance);
}

std::vector<double> default_schedule() {
  return {0.1,  0.05, 0.02, 0.01, 5e-3, 2e-3, 1e-3, 5e-4,
          2e-4, 1e-4, 5e-5, 2e-5, 1e-5, 5e-6, 2e-6, 1e-6};
}

void validate_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw DomainError("empty continuation schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || schedule[i] > 1.0) {
      throw DomainError("continuation epsilon outside (0, 1]");
    }
    if (i > 0 && !(schedule[i] < schedule[i - 1])) {
      throw DomainError("continuation schedule must be strictly decreasing");
    }
  }
}

ContinuationResult continuation(const ShootingUnknowns& start,
                                const TransferProblem& problem,
                                const ThrustConfig& thrust,
                                const std::vector<double>& schedule,
                                const SolverConfig& cfg) {
  validate_schedule(schedule);
  ContinuationResult out;
  ShootingUnknowns current = start;
  for (const double eps : schedule) {
    const ThrustConfig th = thrust.with_epsilon(eps);
    const SolveResult res = solve(current, problem, th, cfg);
    if (!res.converged) {
      out.failed_epsilon = eps;
      return out;
    }
    ContinuationStep step;
    step.epsilon = eps;
    step.unknowns = res.unknowns;
    step.residual_norm = res.residual_norm;
    step.iterations = res.iterations;
    try {
      step.final_mass =
          terminal_state(res.unknowns, problem, th, cfg.integrator).m;
    } catch (const Error&) {
      out.failed_epsilon = eps;
      return out;
    }
    out.chain.push_back(step);
    current = res.unknowns;
  }
  out.completed = true;
  return out;
}

ShootingUnknowns random_guess(const RestartConfig& cfg, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(-cfg.costate_bound,
                                              cfg.costate_bound);
  ShootingUnknowns u;
  for (int i = 0; i < 6; ++i) u.lambda0[i] = dist(rng);
  u.lambda_m0 = dist(rng);
  u.tf = cfg.tf_guess;
  return u;
}

double NominalSolution::final_mass(const ThrustConfig& thrust,
                                   const IntegratorConfig& cfg) const {
  return terminal_state(unknowns, problem, thrust, cfg).m;
}

NominalSolution solve_with_restarts(const TransferProblem& problem,
                                    const ThrustConfig& thrust,
                                    const std::vector<double>& schedule,
                                    const SolverConfig& cfg,
                                    const RestartConfig& restarts) {
  validate_schedule(schedule);
  RestartConfig rc = restarts;
  if (!(rc.tf_guess > 0.0)) rc.tf_guess = make_units(1.0).from_years(1.5);
  const ThrustConfig first = thrust.with_epsilon(schedule.front());

  NominalSolution best;
  best.problem = problem;
  std::vector<std::pair<int, SolveResult>> kept;

  // Restarts run in waves of `threads` so the kept set is the first `keep`
  // converged indices regardless of worker count.
  const int wave = std::max(1, rc.threads);
  int tried = 0;
  for (int begin = 0; begin < rc.restarts && static_cast<int>(kept.size()) <
                                                 rc.keep;
       begin += wave) {
    const int end = std::min(rc.restarts, begin + wave);
    std::vector<SolveResult> results(static_cast<std::size_t>(end - begin));
    detail::parallel_for(static_cast<std::size_t>(begin),
                         static_cast<std::size_t>(end), rc.threads,
                         [&](std::size_t i) {
                           results[i - begin] = solve(
                               random_guess(rc, static_cast<int>(i)), problem,
                               first, cfg);
                         });
    for (int i = begin; i < end; ++i) {
      ++tried;
      if (results[i - begin].converged &&
          static_cast<int>(kept.size()) < rc.keep) {
        kept.emplace_back(i, results[i - begin]);
      }
    }
  }
  best.restarts_tried = tried;
  best.restarts_converged = static_cast<int>(kept.size());

  std::vector<ContinuationResult> chains(kept.size());
  detail::parallel_for(0, kept.size(), rc.threads, [&](std::size_t i) {
    chains[i] =
        continuation(kept[i].second.unknowns, problem, thrust, schedule, cfg);
  });

  double best_mass = -1.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!chains[i].completed) continue;
    const double mass = chains[i].chain.back().final_mass;
    if (mass > best_mass) {
      best_mass = mass;
      best.restart_index = kept[i].first;
      best.continuation = chains[i];
      best.unknowns = chains[i].unknowns();
    }
  }
  if (best.restart_index < 0) {
    std::string msg = "no continuation chain completed (" +
                      std::to_string(kept.size()) + " of " +
                      std::to_string(tried) + " restarts converged";
    double last = 0.0;
    for (const auto& c : chains) {
      if (c.failed_epsilon) last = std::max(last, *c.failed_epsilon);
    }
    if (last > 0.0) msg += ", failing epsilon " + std::to_string(last);
    throw ConvergenceError(msg + ")");
  }
  return best;
}

}  // namespace lowthrust
