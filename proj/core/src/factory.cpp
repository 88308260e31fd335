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

#include "lowthrust/factory.hpp"

#include <boost/math/tools/roots.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>

#include "lowthrust/errors.hpp"
#include "parallel.hpp"

namespace lowthrust {
namespace {

constexpr double kHamiltonianTolerance = 1e-11;

enum class Outcome { kAccepted, kRejectedRoot, kRejectedPropagation };

struct Attempt {
  Outcome outcome = Outcome::kRejectedRoot;
  Trajectory trajectory;
};

double hamiltonian_at(const AugmentedState& aug, const ThrustConfig& thrust) {
  return hamiltonian(aug, optimal_control(aug, thrust), thrust);
}

Attempt attempt(const NominalTerminal& nominal, const ThrustConfig& thrust,
                const PerturbationConfig& cfg, std::int64_t index) {
  std::mt19937_64 rng = perturbation_rng(cfg.seed, index);
  const Costate costate =
      perturb_terminal_costates(nominal.terminal.costate, cfg.rho, rng);
  std::uniform_real_distribution<double> shift(-cfg.rho_l, cfg.rho_l);
  const double delta_l = shift(rng);

  Attempt out;
  const auto restored =
      restore_hamiltonian(nominal.terminal.x, nominal.terminal.m, costate,
                          thrust, delta_l, cfg.mass_lo, cfg.mass_hi);
  if (!restored) return out;
  AugmentedState terminal = nominal.terminal;
  terminal.x.L = restored->L;
  terminal.m = restored->m;
  terminal.costate = costate;
  try {
    out.trajectory = generate_trajectory(terminal, nominal.tf, cfg.n_samples,
                                         thrust, cfg.integrator, index);
  } catch (const Error&) {
    out.outcome = Outcome::kRejectedPropagation;
    return out;
  }
  out.outcome = Outcome::kAccepted;
  return out;
}

}  // namespace

void validate(const PerturbationConfig& cfg) {
  if (!(cfg.rho > 0.0)) throw ConfigError("factory.rho must be positive");
  if (!(cfg.rho_l >= 0.0)) throw ConfigError("factory.rho_l must be >= 0");
  if (cfg.n_trajectories < 0) {
    throw ConfigError("factory.n_trajectories must be >= 0");
  }
  if (cfg.n_samples < 2) throw ConfigError("factory.n_samples must be >= 2");
  if (!(cfg.mass_lo > 0.0 && cfg.mass_lo < 1.0 && cfg.mass_hi > 1.0)) {
    throw ConfigError("factory mass bracket must straddle 1");
  }
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) {
    throw ConfigError("factory.epsilon outside [0, 1]");
  }
}

std::mt19937_64 perturbation_rng(std::uint64_t seed, std::int64_t index) {
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx & 0xffffffffu),
                    static_cast<std::uint32_t>(idx >> 32), 0xfac7u};
  return std::mt19937_64(seq);
}

NominalTerminal nominal_terminal(const TransferProblem& problem,
                                 const ShootingUnknowns& unknowns,
                                 const ThrustConfig& thrust,
                                 const IntegratorConfig& cfg) {
  NominalTerminal out;
  out.tf = unknowns.tf;
  out.terminal = terminal_state(unknowns, problem, thrust, cfg);
  const double l = out.terminal.x.L;
  out.terminal.x = problem.target;
  out.terminal.x.L = l;
  out.terminal.costate.lambda[5] = 0.0;
  out.terminal.costate.lambda_m = 0.0;
  return out;
}

Costate perturb_terminal_costates(const Costate& nominal, double rho,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::Matrix<double, 5, 1> dir;
  do {
    for (int i = 0; i < 5; ++i) dir[i] = normal(rng);
  } while (dir.norm() == 0.0);
  dir.normalize();
  const double radius = rho * std::pow(uni(rng), 0.2);
  Costate out = nominal;
  out.lambda.head<5>() += radius * dir;
  return out;
}

std::optional<RestoredTerminal> restore_hamiltonian(
    const EquinoctialState& x_f, double m_f, const Costate& costate,
    const ThrustConfig& thrust, double delta_l, double mass_lo,
    double mass_hi) {
  AugmentedState aug;
  aug.x = x_f;
  aug.x.L = x_f.L + delta_l;
  aug.costate = costate;
  auto h_of_m = [&](double m) {
    AugmentedState a = aug;
    a.m = m;
    return hamiltonian_at(a, thrust);
  };
  double lo = mass_lo * m_f;
  double hi = mass_hi * m_f;
  const double h_lo = h_of_m(lo);
  const double h_hi = h_of_m(hi);
  if (!std::isfinite(h_lo) || !std::isfinite(h_hi)) return std::nullopt;
  if (h_lo == 0.0) return RestoredTerminal{lo, aug.x.L};
  if (h_hi == 0.0) return RestoredTerminal{hi, aug.x.L};
  if ((h_lo > 0.0) == (h_hi > 0.0)) return std::nullopt;

  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      h_of_m, lo, hi, h_lo, h_hi, boost::math::tools::eps_tolerance<double>(),
      max_iter);
  const double a = bracket.first;
  const double b = bracket.second;
  const double h_a = std::abs(h_of_m(a));
  const double h_b = std::abs(h_of_m(b));
  const double m = h_a <= h_b ? a : b;
  if (!(std::min(h_a, h_b) < kHamiltonianTolerance)) return std::nullopt;
  return RestoredTerminal{m, aug.x.L};
}

Trajectory generate_trajectory(const AugmentedState& terminal, double tf,
                               std::size_t n_samples,
                               const ThrustConfig& thrust,
                               const IntegratorConfig& cfg,
                               std::int64_t trajectory_id) {
  if (!(tf > 0.0)) throw DomainError("transfer time must be positive");
  const SampledTrajectory back =
      propagate_sampled(terminal, tf, 0.0, n_samples, thrust, cfg);
  Trajectory out(n_samples);
  const double m_f = terminal.m;
  for (std::size_t j = 0; j < n_samples; ++j) {
    // Backward sample n-1-j sits at time-to-go j * tf / (n - 1).
    const std::size_t src = n_samples - 1 - j;
    const AugmentedState& s = back.states[src];
    TrajectorySample& row = out[j];
    row.trajectory_id = trajectory_id;
    row.sample_index = static_cast<std::int64_t>(j);
    row.time_to_go = tf - back.times[src];
    row.x = s.x;
    row.m = s.m;
    row.costate = s.costate;
    row.throttle = back.controls[src].throttle;
    row.direction = back.controls[src].direction;
    row.propellant_to_go = s.m - m_f;
    row.value = row.propellant_to_go / thrust.c2;
  }
  return out;
}

FactoryStats run_factory(const NominalTerminal& nominal,
                         const ThrustConfig& thrust,
                         const PerturbationConfig& cfg,
                         const TrajectorySink& sink) {
  validate(cfg);
  const ThrustConfig th = thrust.with_epsilon(cfg.epsilon);
  const auto start = std::chrono::steady_clock::now();
  FactoryStats stats;
  const std::int64_t chunk =
      std::max<std::int64_t>(64, 16 * static_cast<std::int64_t>(cfg.threads));
  std::vector<Attempt> results;
  for (std::int64_t begin = 0; begin < cfg.n_trajectories; begin += chunk) {
    const std::int64_t end = std::min(cfg.n_trajectories, begin + chunk);
    results.assign(static_cast<std::size_t>(end - begin), Attempt{});
    detail::parallel_for(
        static_cast<std::size_t>(begin), static_cast<std::size_t>(end),
        cfg.threads, [&](std::size_t i) {
          results[i - static_cast<std::size_t>(begin)] =
              attempt(nominal, th, cfg, static_cast<std::int64_t>(i));
        });
    for (Attempt& a : results) {
      ++stats.attempted;
      switch (a.outcome) {
        case Outcome::kAccepted:
          ++stats.accepted;
          sink(std::move(a.trajectory));
          break;
        case Outcome::kRejectedRoot:
          ++stats.rejected_root;
          break;
        case Outcome::kRejectedPropagation:
          ++stats.rejected_propagation;
          break;
      }
    }
  }
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return stats;
}

}  // namespace lowthrust
