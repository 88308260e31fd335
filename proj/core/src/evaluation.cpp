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

#include "lowthrust/evaluation.hpp"

#include <cmath>
#include <numbers>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

using Vec7Map = Eigen::Matrix<double, 7, 1>;

Vector network_input(const EquinoctialState& x, double m) {
  Vector in(7);
  in.head<6>() = x.to_vector();
  in[6] = m;
  return in;
}

Eigen::Vector4d scaled_of(const Control& c) {
  Eigen::Vector4d s;
  s[0] = c.throttle;
  s.tail<3>() = (c.direction.array() + 1.0) * 0.5;
  return s;
}

void record_sample(RolloutResult& out, double t, const EquinoctialState& x,
                   double m, const Control& c, const EquinoctialState& target) {
  out.times.push_back(t);
  out.states.push_back(x);
  out.masses.push_back(m);
  out.controls.push_back(c);
  out.orbit_distance.push_back(orbit_distance(x, target));
  out.cartesian_distance.push_back(cartesian_distance_to_orbit(x, target));
}

void finish(RolloutResult& out, double m0, const EquinoctialState& target) {
  if (out.states.empty()) return;
  out.propellant_spent = m0 - out.masses.back();
  out.terminal_residual = orbit_distance(out.states.back(), target);
}

}  // namespace

Eigen::Vector4d Controller::scaled_control(const EquinoctialState& x,
                                           double m) const {
  return scaled_of(control(x, m));
}

PolicyNetController::PolicyNetController(Mlp model, std::string name)
    : model_(std::move(model)), name_(std::move(name)) {
  if (model_.input_dim() != 7 || model_.output_dim() != 4) {
    throw DomainError("policy network must map 7 inputs to 4 outputs");
  }
}

Control PolicyNetController::control(const EquinoctialState& x,
                                     double m) const {
  return decode_policy_output(model_.forward_one(network_input(x, m)));
}

Eigen::Vector4d PolicyNetController::scaled_control(const EquinoctialState& x,
                                                    double m) const {
  return model_.forward_one(network_input(x, m));
}

ValueNetController::ValueNetController(Mlp model, ThrustConfig thrust,
                                       std::string name)
    : model_(std::move(model)), thrust_(thrust), name_(std::move(name)) {
  if (model_.input_dim() != 7 || model_.output_dim() != 1) {
    throw DomainError("value network must map 7 inputs to 1 output");
  }
}

Control ValueNetController::control(const EquinoctialState& x,
                                    double m) const {
  return policy_from_value_net(model_, x, m, thrust_);
}

Control policy_from_value_net(const Mlp& model, const EquinoctialState& x,
                              double m, const ThrustConfig& thrust) {
  const Vector g = model.input_gradient_one(network_input(x, m));
  AugmentedState aug;
  aug.x = x;
  aug.m = m;
  aug.costate.lambda = g.head<6>();
  aug.costate.lambda_m = g[6];
  return optimal_control(aug, thrust);
}

ErrorStats error_stats(const std::vector<double>& abs_errors) {
  ErrorStats s;
  if (abs_errors.empty()) return s;
  const auto n = static_cast<double>(abs_errors.size());
  for (double e : abs_errors) s.mean += e;
  s.mean /= n;
  for (double e : abs_errors) s.std += (e - s.mean) * (e - s.mean);
  s.std = std::sqrt(s.std / n);
  return s;
}

ControlErrorReport control_errors(const Controller& controller,
                                  const std::vector<TrajectorySample>& rows) {
  ControlErrorReport r;
  r.controller = controller.name();
  r.samples = rows.size();
  std::array<std::vector<double>, 4> phys, scaled;
  for (auto& v : phys) v.reserve(rows.size());
  for (auto& v : scaled) v.reserve(rows.size());
  for (const TrajectorySample& s : rows) {
    const Control c = controller.control(s.x, s.m);
    const Eigen::Vector4d sc = controller.scaled_control(s.x, s.m);
    Control truth;
    truth.throttle = s.throttle;
    truth.direction = s.direction;
    const Eigen::Vector4d st = scaled_of(truth);
    phys[0].push_back(std::abs(c.throttle - s.throttle));
    for (int i = 0; i < 3; ++i) {
      phys[static_cast<std::size_t>(i) + 1].push_back(
          std::abs(c.direction[i] - s.direction[i]));
    }
    for (int i = 0; i < 4; ++i) {
      scaled[static_cast<std::size_t>(i)].push_back(std::abs(sc[i] - st[i]));
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    r.physical[i] = error_stats(phys[i]);
    r.scaled[i] = error_stats(scaled[i]);
  }
  return r;
}

void add_value_error(ControlErrorReport& report, const Mlp& value_model,
                     const std::vector<TrajectorySample>& rows) {
  const Matrix pred = value_model.forward(state_inputs(rows));
  std::vector<double> err(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    err[j] = std::abs(pred(0, static_cast<Eigen::Index>(j)) - rows[j].value);
  }
  report.value = error_stats(err);
}

double orbit_distance(const EquinoctialState& x,
                      const EquinoctialState& target) {
  const Vec6 d = x.to_vector() - target.to_vector();
  return d.head<5>().norm();
}

double cartesian_distance_to_orbit(const EquinoctialState& x,
                                   const EquinoctialState& target,
                                   int n_points) {
  if (n_points < 1) throw DomainError("need at least one orbit point");
  const Vec3 r = to_cartesian(x).r;
  double best = std::numeric_limits<double>::infinity();
  EquinoctialState on = target;
  for (int i = 0; i < n_points; ++i) {
    on.L = 2.0 * std::numbers::pi * i / n_points;
    best = std::min(best, (to_cartesian(on).r - r).norm());
  }
  return best;
}

RolloutResult rollout(const Controller& controller, const EquinoctialState& x0,
                      double m0, double tf, const EquinoctialState& target,
                      const ThrustConfig& thrust, std::size_t n_samples,
                      const IntegratorConfig& cfg) {
  RolloutResult out;
  out.controller = controller.name();
  const std::vector<double> times = sample_times(0.0, tf, n_samples);
  auto rhs = [&](double, const Vec7Map& s) {
    const EquinoctialState x = EquinoctialState::from_vector(s.head<6>());
    const StateRates r = eom_rhs(x, s[6], controller.control(x, s[6]), thrust);
    Vec7Map d;
    d << r.x_dot, r.m_dot;
    return d;
  };
  Dop853<7> stepper(cfg);
  Vec7Map y;
  y << x0.to_vector(), m0;
  try {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (i > 0) stepper.advance(rhs, y, times[i - 1], times[i]);
      const EquinoctialState x = EquinoctialState::from_vector(y.head<6>());
      record_sample(out, times[i], x, y[6], controller.control(x, y[6]),
                    target);
    }
    out.completed = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  finish(out, m0, target);
  return out;
}

RolloutResult rollout_value_net(const Mlp& model, const std::string& name,
                                const EquinoctialState& x0, double m0,
                                double tf, const EquinoctialState& target,
                                const ThrustConfig& thrust,
                                std::size_t n_samples,
                                const IntegratorConfig& cfg) {
  for (double eps : {0.0, kFallbackExtractionEpsilon}) {
    const ValueNetController ctrl(model, thrust.with_epsilon(eps), name);
    RolloutResult r = rollout(ctrl, x0, m0, tf, target, ctrl.thrust(),
                              n_samples, cfg);
    r.extraction_epsilon = eps;
    if (r.completed || eps == kFallbackExtractionEpsilon) return r;
  }
  return {};
}

RolloutResult replay_pmp(const AugmentedState& start, double tf,
                         const EquinoctialState& target,
                         const ThrustConfig& thrust, std::size_t n_samples,
                         const IntegratorConfig& cfg) {
  RolloutResult out;
  out.controller = "optimal";
  try {
    const SampledTrajectory traj =
        propagate_sampled(start, 0.0, tf, n_samples, thrust, cfg);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      record_sample(out, traj.times[i], traj.states[i].x, traj.states[i].m,
                    traj.controls[i], target);
    }
    out.completed = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  finish(out, start.m, target);
  return out;
}

RefinedChain refined_continuation(const ShootingUnknowns& start,
                                  const TransferProblem& problem,
                                  const ThrustConfig& thrust,
                                  const std::vector<double>& schedule,
                                  const SolverConfig& solver,
                                  int max_refinements) {
  validate_schedule(schedule);
  RefinedChain out;
  ShootingUnknowns cur = start;
  double eps = schedule.front();
  out.reached_epsilon = eps;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const double target_eps = schedule[i];
    int fails = 0;
    while (eps > target_eps) {
      double next = target_eps;
      for (int f = 0; f < fails; ++f) next = std::sqrt(next * eps);
      const SolveResult s =
          solve(cur, problem, thrust.with_epsilon(next), solver);
      ++out.solves;
      if (s.converged) {
        cur = s.unknowns;
        eps = next;
        out.reached_epsilon = eps;
        fails = 0;
      } else if (++fails > max_refinements) {
        out.failed_epsilon = next;
        return out;
      }
    }
  }
  out.unknowns = cur;
  return out;
}

GapCloseResult gap_close(const EquinoctialState& x, double m,
                         const EquinoctialState& target,
                         const ThrustConfig& thrust, const GapCloseConfig& cfg,
                         const std::vector<Costate>& hints) {
  GapCloseResult out;
  if (orbit_distance(x, target) < cfg.arrival_tolerance) {
    out.converged = true;
    out.message = "already on target orbit";
    return out;
  }
  validate_schedule(cfg.schedule);
  if (cfg.keep < 1 || cfg.restarts < 0 || cfg.max_refinements < 0) {
    throw ConfigError("gap close needs keep >= 1 and non-negative counts");
  }
  TransferProblem problem;
  problem.x0 = x;
  problem.m0 = m;
  problem.target = target;
  const ThrustConfig first = thrust.with_epsilon(cfg.schedule.front());

  std::vector<ShootingUnknowns> guesses;
  for (const Costate& h : hints) {
    for (double tf : cfg.tf_guesses) {
      ShootingUnknowns g;
      g.lambda0 = h.lambda;
      g.lambda_m0 = h.lambda_m;
      g.tf = tf;
      guesses.push_back(g);
    }
  }
  RestartConfig rc;
  rc.costate_bound = cfg.costate_bound;
  rc.seed = cfg.seed;
  for (int i = 0; i < cfg.restarts; ++i) {
    rc.tf_guess = cfg.tf_guesses.empty()
                      ? 1.0
                      : cfg.tf_guesses[static_cast<std::size_t>(i) %
                                       cfg.tf_guesses.size()];
    guesses.push_back(random_guess(rc, i));
  }

  double best = std::numeric_limits<double>::infinity();
  const ThrustConfig last = thrust.with_epsilon(cfg.schedule.back());
  auto run_chain = [&](const ShootingUnknowns& g, const SolverConfig& solver) {
    const SolveResult first_solve = solve(g, problem, first, solver);
    if (!first_solve.converged) return false;
    ++out.first_solutions;
    const RefinedChain chain =
        refined_continuation(first_solve.unknowns, problem, thrust,
                             cfg.schedule, solver, cfg.max_refinements);
    if (!chain.unknowns) {
      out.failed_epsilon = chain.failed_epsilon;
      return false;
    }
    ++out.chains_completed;
    const AugmentedState end =
        propagate(initial_state(*chain.unknowns, problem), 0.0,
                  chain.unknowns->tf, last, solver.integrator);
    const double dm = m - end.m;
    if (dm < best) {
      best = dm;
      out.unknowns = chain.unknowns;
    }
    return true;
  };

  // A hint may already solve the final problem, as on an optimal tail.
  const std::size_t n_hinted = hints.size() * cfg.tf_guesses.size();
  for (std::size_t i = 0; i < n_hinted; ++i) {
    if (out.chains_completed >= cfg.keep) break;
    const SolveResult direct = solve(guesses[i], problem, last, cfg.solver);
    if (!direct.converged) continue;
    ++out.chains_completed;
    const AugmentedState end =
        propagate(initial_state(direct.unknowns, problem), 0.0,
                  direct.unknowns.tf, last, cfg.solver.integrator);
    if (m - end.m < best) {
      best = m - end.m;
      out.unknowns = direct.unknowns;
    }
  }
  for (const ShootingUnknowns& g : guesses) {
    if (out.chains_completed >= cfg.keep) break;
    run_chain(g, cfg.solver);
  }

  if (out.chains_completed == 0 && !cfg.fixed_tfs.empty()) {
    SolverConfig fixed = cfg.solver;
    fixed.fixed_time = true;
    for (double tf : cfg.fixed_tfs) {
      if (!(tf > 0.0)) throw ConfigError("gap close fixed tf must be > 0");
      // One completed chain per duration; hints first, then restarts.
      bool done = false;
      for (const Costate& h : hints) {
        ShootingUnknowns g;
        g.lambda0 = h.lambda;
        g.lambda_m0 = h.lambda_m;
        g.tf = tf;
        if ((done = run_chain(g, fixed))) break;
      }
      for (int i = 0; !done && i < cfg.restarts; ++i) {
        rc.tf_guess = tf;
        done = run_chain(random_guess(rc, i), fixed);
      }
    }
    out.fixed_time = out.chains_completed > 0;
  }

  if (out.chains_completed == 0) {
    out.message = "no correction converged (" +
                  std::to_string(out.first_solutions) +
                  " first-epsilon solutions)";
    return out;
  }
  out.converged = true;
  out.delta_m = best;
  return out;
}

}  // namespace lowthrust
