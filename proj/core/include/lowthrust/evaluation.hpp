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

#ifndef LOWTHRUST_EVALUATION_HPP_
#define LOWTHRUST_EVALUATION_HPP_

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lowthrust/neural.hpp"
#include "lowthrust/shooting.hpp"
#include "lowthrust/training.hpp"

namespace lowthrust {

// Feedback law u(x, m).
class Controller {
 public:
  virtual ~Controller() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual Control control(const EquinoctialState& x,
                                        double m) const = 0;
  // Control in the policy network's target space [u, (i_tau + 1) / 2].
  [[nodiscard]] virtual Eigen::Vector4d scaled_control(
      const EquinoctialState& x, double m) const;
};

class PolicyNetController final : public Controller {
 public:
  PolicyNetController(Mlp model, std::string name = "N_u");
  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] Control control(const EquinoctialState& x,
                                double m) const override;
  [[nodiscard]] Eigen::Vector4d scaled_control(const EquinoctialState& x,
                                               double m) const override;

 private:
  Mlp model_;
  std::string name_;
};

// Control from the input gradient of a value network.
class ValueNetController final : public Controller {
 public:
  ValueNetController(Mlp model, ThrustConfig thrust, std::string name);
  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] Control control(const EquinoctialState& x,
                                double m) const override;
  [[nodiscard]] const ThrustConfig& thrust() const { return thrust_; }

 private:
  Mlp model_;
  ThrustConfig thrust_;
  std::string name_;
};

class ConstantController final : public Controller {
 public:
  explicit ConstantController(Control c) : c_(std::move(c)) {}
  [[nodiscard]] std::string name() const override { return "constant"; }
  [[nodiscard]] Control control(const EquinoctialState&,
                                double) const override {
    return c_;
  }

 private:
  Control c_;
};

// [lambda, lambda_m] = dN/d[x, m], then the closed-form control with the
// thrust's epsilon (0 gives the bang-bang rule).
Control policy_from_value_net(const Mlp& model, const EquinoctialState& x,
                              double m, const ThrustConfig& thrust);

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;
};

ErrorStats error_stats(const std::vector<double>& abs_errors);

struct ControlErrorReport {
  std::string controller;
  std::array<ErrorStats, 4> physical;  // u, i_r, i_t, i_n
  std::array<ErrorStats, 4> scaled;    // in [0, 1] target space
  std::optional<ErrorStats> value;
  std::size_t samples = 0;
};

ControlErrorReport control_errors(const Controller& controller,
                                  const std::vector<TrajectorySample>& rows);

// Adds the value-prediction error of a value network to a report.
void add_value_error(ControlErrorReport& report, const Mlp& value_model,
                     const std::vector<TrajectorySample>& rows);

// Norm of the (p, f, g, h, k) difference; independent of L.
double orbit_distance(const EquinoctialState& x,
                      const EquinoctialState& target);

// Smallest Cartesian distance from x to n points spread in true longitude
// along the target orbit.
double cartesian_distance_to_orbit(const EquinoctialState& x,
                                   const EquinoctialState& target,
                                   int n_points = 360);

struct RolloutResult {
  std::string controller;
  std::vector<double> times;
  std::vector<EquinoctialState> states;
  std::vector<double> masses;
  std::vector<Control> controls;
  std::vector<double> orbit_distance;
  std::vector<double> cartesian_distance;
  double propellant_spent = 0.0;  // m0 - m(tf)
  double terminal_residual = 0.0;
  bool completed = false;
  std::string error;
  // Epsilon used for value-network policy extraction, when applicable.
  std::optional<double> extraction_epsilon;
};

// Closed-loop integration of (x, m) with the controller queried at every
// right-hand-side evaluation.
RolloutResult rollout(const Controller& controller, const EquinoctialState& x0,
                      double m0, double tf, const EquinoctialState& target,
                      const ThrustConfig& thrust, std::size_t n_samples = 1000,
                      const IntegratorConfig& cfg = {});

// Integrates the state/co-state system from the nominal initial co-states.
RolloutResult replay_pmp(const AugmentedState& start, double tf,
                         const EquinoctialState& target,
                         const ThrustConfig& thrust,
                         std::size_t n_samples = 1000,
                         const IntegratorConfig& cfg = {});

// Value-network rollout at epsilon = 0, retried at epsilon = 1e-4 when the
// bang-bang feedback stalls the integrator.
RolloutResult rollout_value_net(const Mlp& model, const std::string& name,
                                const EquinoctialState& x0, double m0,
                                double tf, const EquinoctialState& target,
                                const ThrustConfig& thrust,
                                std::size_t n_samples = 1000,
                                const IntegratorConfig& cfg = {});

inline constexpr double kFallbackExtractionEpsilon = 1e-4;

struct GapCloseConfig {
  std::vector<double> schedule = default_schedule();
  SolverConfig solver = gap_close_solver();
  // Below this orbit distance the reached state already counts as arrived.
  double arrival_tolerance = 1e-8;
  // Guesses: every hint at each tf, tried directly at the last epsilon and
  // then from the first, followed by random restarts cycling the tfs.
  std::vector<double> tf_guesses = {0.5, 1.0, 2.0, 4.0, 8.0};
  int restarts = 40;
  double costate_bound = 10.0;
  std::uint64_t seed = 0;
  int keep = 1;  // completed chains compared before stopping
  // Consecutive geometric bisections of a failed epsilon step.
  int max_refinements = 8;
  // Fallback when no free-time chain completes: fixed-duration corrections
  // over this grid, cheapest one wins. Near the target orbit the free-time
  // Hamiltonian often has no root, the cost flattening out with duration.
  std::vector<double> fixed_tfs = {0.5, 1.0, 2.0, 4.0, 8.0};

  static SolverConfig gap_close_solver() {
    SolverConfig s;
    s.tolerance = 1e-7;
    return s;
  }
};

struct GapCloseResult {
  bool converged = false;
  double delta_m = 0.0;  // nondimensional propellant of the correction
  std::optional<ShootingUnknowns> unknowns;
  int chains_completed = 0;
  int first_solutions = 0;
  std::optional<double> failed_epsilon;  // of the last failed chain
  bool fixed_time = false;  // correction came from the fixed-duration grid
  std::string message;
};

// Continuation that bisects failed steps geometrically. Returns the unknowns
// at schedule.back(), or nullopt with the epsilon that could not be reached.
struct RefinedChain {
  std::optional<ShootingUnknowns> unknowns;
  double reached_epsilon = 0.0;
  std::optional<double> failed_epsilon;
  int solves = 0;
};
RefinedChain refined_continuation(const ShootingUnknowns& start,
                                  const TransferProblem& problem,
                                  const ThrustConfig& thrust,
                                  const std::vector<double>& schedule,
                                  const SolverConfig& solver,
                                  int max_refinements);

// Mass-optimal correction from (x, m) to the target orbit.
GapCloseResult gap_close(const EquinoctialState& x, double m,
                         const EquinoctialState& target,
                         const ThrustConfig& thrust,
                         const GapCloseConfig& cfg = {},
                         const std::vector<Costate>& hints = {});

}  // namespace lowthrust

#endif  // LOWTHRUST_EVALUATION_HPP_
