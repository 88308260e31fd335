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

#include "lowthrust/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(parse_number<T>(key, t));
  }
  return out;
}

template <typename T>
std::string render_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

struct Key {
  std::string section;
  std::string name;
  std::string note;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Member>
Key make_key(std::string section, std::string name, std::string note,
             Member member) {
  using T = std::remove_cvref_t<decltype(member(std::declval<RunConfig&>()))>;
  Key k;
  k.section = std::move(section);
  k.name = std::move(name);
  k.note = std::move(note);
  const std::string full = k.section + "." + k.name;
  k.get = [member](const RunConfig& c) {
    const T& v = member(const_cast<RunConfig&>(c));
    if constexpr (std::is_same_v<T, std::string>) {
      return v;
    } else if constexpr (std::is_same_v<T, DatasetFormat>) {
      return to_string(v);
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_double(v);
    } else if constexpr (std::is_arithmetic_v<T>) {
      return std::to_string(v);
    } else {
      return render_list(v);
    }
  };
  k.set = [member, full](RunConfig& c, const std::string& text) {
    T& v = member(c);
    if constexpr (std::is_same_v<T, std::string>) {
      v = text;
    } else if constexpr (std::is_same_v<T, DatasetFormat>) {
      try {
        v = dataset_format_from_string(text);
      } catch (const IoError&) {
        throw ConfigError("invalid value '" + text + "' for " + full);
      }
    } else if constexpr (std::is_arithmetic_v<T>) {
      v = parse_number<T>(full, text);
    } else {
      v = parse_list<typename T::value_type>(full, text);
    }
  };
  return k;
}

#define LT_KEY(section, name, expr, note)                               \
  make_key(section, name, note,                                         \
           [](RunConfig& c) -> auto& { return c.expr; })

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      LT_KEY("mission", "epoch", mission.epoch, "launch date of the nominal"),
      LT_KEY("mission", "departure", mission.departure, "departure planet"),
      LT_KEY("mission", "arrival", mission.arrival, "target planet orbit"),
      LT_KEY("mission", "m0_kg", mission.spacecraft.m0_kg,
             "initial mass, also the mass unit"),
      LT_KEY("mission", "isp_s", mission.spacecraft.isp_s,
             "specific impulse"),
      LT_KEY("mission", "max_thrust_n", mission.spacecraft.max_thrust_n,
             "maximum thrust"),
      LT_KEY("solver", "tolerance", solver.tolerance,
             "shooting residual max-norm"),
      LT_KEY("solver", "max_iterations", solver.max_iterations,
             "Jacobian evaluations per solve"),
      LT_KEY("solver", "fd_step", solver.fd_step,
             "relative finite-difference step"),
      LT_KEY("solver", "rel_tol", solver.rel_tol, "integrator tolerance"),
      LT_KEY("solver", "abs_tol", solver.abs_tol, "integrator tolerance"),
      LT_KEY("solver", "schedule", solver.schedule,
             "epsilon continuation, 0.1 down to 1e-6"),
      LT_KEY("solver", "restarts", solver.restarts,
             "random co-state restarts"),
      LT_KEY("solver", "costate_bound", solver.costate_bound,
             "restart co-states uniform in [-b, b]"),
      LT_KEY("solver", "tf_guess_years", solver.tf_guess_years,
             "initial transfer time guess"),
      LT_KEY("solver", "keep", solver.keep,
             "converged restarts continued to the end"),
      LT_KEY("solver", "seed", solver.seed, "restart seed"),
      LT_KEY("factory", "n_trajectories", factory.n_trajectories,
             "desk scale; 500000 attempts in the original study"),
      LT_KEY("factory", "n_samples", factory.n_samples,
             "equispaced samples per trajectory"),
      LT_KEY("factory", "rho", factory.rho, "co-state perturbation radius"),
      LT_KEY("factory", "rho_l", factory.rho_l,
             "terminal true longitude perturbation"),
      LT_KEY("factory", "epsilon", factory.epsilon,
             "homotopy parameter of generated trajectories"),
      LT_KEY("factory", "seed", factory.seed, "perturbation seed"),
      LT_KEY("factory", "format", factory.format, "csv or binary"),
      LT_KEY("training", "batch_size", training.batch_size,
             "desk scale; 8192 in the original study"),
      LT_KEY("training", "learning_rate", training.learning_rate,
             "desk scale; 1e-5 in the original study"),
      LT_KEY("training", "epochs", training.epochs,
             "desk scale; 300 in the original study"),
      LT_KEY("training", "train_ratio", training.train_ratio,
             "trajectory-level split"),
      LT_KEY("training", "validation_ratio", training.validation_ratio,
             "trajectory-level split"),
      LT_KEY("training", "seed", training.seed, "split, init and shuffle"),
      LT_KEY("training", "policy_hidden", training.policy_hidden,
             "hidden widths of N_u"),
      LT_KEY("training", "value_hidden", training.value_hidden,
             "hidden widths of N_v and N_grad_v"),
      LT_KEY("evaluation", "rollout_samples", evaluation.rollout_samples,
             "samples per closed-loop rollout"),
      LT_KEY("evaluation", "rollout_tolerance",
             evaluation.rollout_tolerance,
             "integrator tolerance of network rollouts"),
      LT_KEY("evaluation", "rollout_max_steps", evaluation.rollout_max_steps,
             "integrator step budget per rollout attempt"),
      LT_KEY("evaluation", "gap_tolerance", evaluation.gap_tolerance,
             "shooting tolerance of the correction"),
      LT_KEY("evaluation", "gap_restarts", evaluation.gap_restarts,
             "random restarts of the correction"),
      LT_KEY("evaluation", "gap_keep", evaluation.gap_keep,
             "completed correction chains compared"),
      LT_KEY("paths", "run_dir", paths.run_dir,
             "output directory; LOWTHRUST_RUN_DIR overrides the default"),
      LT_KEY("run", "threads", threads, "worker cap"),
  };
  return keys;
}

#undef LT_KEY

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

Epoch RunConfig::launch_epoch() const { return epoch_from_string(mission.epoch); }

Units RunConfig::units() const { return make_units(mission.spacecraft.m0_kg); }

ThrustConfig RunConfig::thrust(double epsilon) const {
  return make_thrust_config(mission.spacecraft, epsilon);
}

TransferProblem RunConfig::problem() const {
  const Epoch launch = launch_epoch();
  const PlanetState dep =
      planet_state(planet_from_string(mission.departure), launch);
  TransferProblem p;
  p.x0 = from_cartesian(dep.cartesian.r, dep.cartesian.v);
  p.m0 = 1.0;
  p.target = planet_state(planet_from_string(mission.arrival), launch).elements;
  return p;
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.tolerance = solver.tolerance;
  s.max_iterations = solver.max_iterations;
  s.fd_step = solver.fd_step;
  s.integrator.rel_tol = solver.rel_tol;
  s.integrator.abs_tol = solver.abs_tol;
  return s;
}

RestartConfig RunConfig::restart_config() const {
  RestartConfig r;
  r.restarts = solver.restarts;
  r.costate_bound = solver.costate_bound;
  r.tf_guess = units().from_years(solver.tf_guess_years);
  r.seed = solver.seed;
  r.keep = solver.keep;
  r.threads = threads;
  return r;
}

PerturbationConfig RunConfig::perturbation_config() const {
  PerturbationConfig p;
  p.rho = factory.rho;
  p.rho_l = factory.rho_l;
  p.n_trajectories = factory.n_trajectories;
  p.n_samples = factory.n_samples;
  p.seed = factory.seed;
  p.epsilon = factory.epsilon;
  p.threads = threads;
  p.integrator.rel_tol = solver.rel_tol;
  p.integrator.abs_tol = solver.abs_tol;
  return p;
}

TrainConfig RunConfig::train_config(Task task) const {
  TrainConfig t;
  t.task = task;
  t.batch_size = training.batch_size;
  t.learning_rate = training.learning_rate;
  t.epochs = training.epochs;
  t.train_ratio = training.train_ratio;
  t.validation_ratio = training.validation_ratio;
  t.test_ratio = 1.0 - training.train_ratio - training.validation_ratio;
  t.seed = training.seed;
  t.hidden = task == Task::kPolicy ? training.policy_hidden
                                   : training.value_hidden;
  return t;
}

GapCloseConfig RunConfig::gap_close_config() const {
  GapCloseConfig g;
  g.schedule = solver.schedule;
  g.solver = solver_config();
  g.solver.tolerance = evaluation.gap_tolerance;
  g.restarts = evaluation.gap_restarts;
  g.keep = evaluation.gap_keep;
  g.costate_bound = solver.costate_bound;
  g.seed = solver.seed;
  return g;
}

void validate(const RunConfig& c) {
  require(!c.mission.epoch.empty(), "mission.epoch", "missing launch epoch");
  try {
    (void)c.launch_epoch();
  } catch (const Error& e) {
    throw ConfigError(std::string("mission.epoch: ") + e.what());
  }
  for (const auto& [key, name] :
       {std::pair{"mission.departure", &c.mission.departure},
        std::pair{"mission.arrival", &c.mission.arrival}}) {
    try {
      (void)planet_from_string(*name);
    } catch (const Error& e) {
      throw ConfigError(std::string(key) + ": " + e.what());
    }
  }
  require(c.mission.departure != c.mission.arrival, "mission.arrival",
          "must differ from the departure planet");
  require(c.mission.spacecraft.m0_kg > 0, "mission.m0_kg", "must be positive");
  require(c.mission.spacecraft.isp_s > 0, "mission.isp_s", "must be positive");
  require(c.mission.spacecraft.max_thrust_n > 0, "mission.max_thrust_n",
          "must be positive");
  require(c.solver.tolerance > 0, "solver.tolerance", "must be positive");
  require(c.solver.max_iterations > 0, "solver.max_iterations",
          "must be positive");
  require(c.solver.fd_step > 0, "solver.fd_step", "must be positive");
  require(c.solver.rel_tol > 0 && c.solver.abs_tol > 0, "solver.rel_tol",
          "integrator tolerances must be positive");
  try {
    validate_schedule(c.solver.schedule);
  } catch (const Error& e) {
    throw ConfigError(std::string("solver.schedule: ") + e.what());
  }
  require(c.solver.restarts > 0, "solver.restarts", "must be positive");
  require(c.solver.costate_bound > 0, "solver.costate_bound",
          "must be positive");
  require(c.solver.tf_guess_years > 0, "solver.tf_guess_years",
          "must be positive");
  require(c.solver.keep > 0, "solver.keep", "must be positive");
  require(c.threads > 0, "run.threads", "must be positive");
  try {
    validate(c.perturbation_config());
  } catch (const Error& e) {
    throw ConfigError(std::string("factory: ") + e.what());
  }
  for (Task t : {Task::kPolicy, Task::kValue}) {
    try {
      validate(c.train_config(t));
    } catch (const Error& e) {
      throw ConfigError(std::string("training: ") + e.what());
    }
  }
  require(c.evaluation.rollout_samples >= 2, "evaluation.rollout_samples",
          "need at least two samples");
  require(c.evaluation.rollout_tolerance > 0, "evaluation.rollout_tolerance",
          "must be positive");
  require(c.evaluation.rollout_max_steps >= 1000,
          "evaluation.rollout_max_steps", "must be at least 1000");
  require(c.evaluation.gap_tolerance > 0, "evaluation.gap_tolerance",
          "must be positive");
  require(c.evaluation.gap_restarts >= 0, "evaluation.gap_restarts",
          "must be non-negative");
  require(c.evaluation.gap_keep > 0, "evaluation.gap_keep",
          "must be positive");
  require(!c.paths.run_dir.empty(), "paths.run_dir", "must not be empty");
}

RunConfig parse_run_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  const auto& keys = registry();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("key '" + section + "' outside any section");
    }
    for (const auto& [name, value] : body) {
      const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) {
        return k.section == section && k.name == name;
      });
      if (it == keys.end()) {
        throw ConfigError("unknown key " + section + "." + name);
      }
      it->set(cfg, trim(value.data()));
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse_run_config(in);
}

std::string render_run_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Key& k : registry()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += "; " + k.note + "\n";
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace lowthrust
