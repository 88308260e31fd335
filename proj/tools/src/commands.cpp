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

#include "commands.hpp"

#include <chrono>
#include <ostream>

#include "artifacts.hpp"
#include "json.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/evaluation.hpp"
#include "lowthrust/factory.hpp"
#include "lowthrust/neural.hpp"

namespace lowthrust::tools {

using nlohmann::json;

namespace {

void note(const Context& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << std::endl;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Costate costate_of(const Vector& g) {
  Costate c;
  c.lambda = g.head<6>();
  c.lambda_m = g[6];
  return c;
}

}  // namespace

NominalOutcome cmd_nominal(const Context& ctx, const fs::path& out_dir) {
  const RunConfig& cfg = ctx.config;
  const Units units = cfg.units();
  const TransferProblem problem = cfg.problem();
  const ThrustConfig thrust = cfg.thrust(cfg.solver.schedule.back());
  const SolverConfig solver = cfg.solver_config();
  note(ctx, "nominal: " + std::to_string(cfg.solver.restarts) +
                " restarts, keep " + std::to_string(cfg.solver.keep));
  const NominalSolution sol = solve_with_restarts(
      problem, thrust, cfg.solver.schedule, solver, cfg.restart_config());

  ensure_dir(out_dir);
  NominalOutcome out;
  out.artifact = out_dir / "nominal.json";
  write_nominal(out.artifact, sol, thrust, units, solver.integrator);

  std::string chain = "epsilon,tf_years,final_mass_kg,residual,iterations\n";
  for (const ContinuationStep& s : sol.continuation.chain) {
    chain += csv_double(s.epsilon) + "," +
             csv_double(units.years(s.unknowns.tf)) + "," +
             csv_double(units.kg(s.final_mass)) + "," +
             csv_double(s.residual_norm) + "," +
             std::to_string(s.iterations) + "\n";
  }
  write_text(out_dir / "nominal_chain.csv", chain);

  const SampledTrajectory traj =
      propagate_sampled(initial_state(sol.unknowns, problem), 0.0,
                        sol.unknowns.tf, cfg.evaluation.rollout_samples,
                        thrust, solver.integrator);
  std::string csv =
      "t_years,p,f,g,h,k,L,m_kg,l_p,l_f,l_g,l_h,l_k,l_L,l_m,throttle,"
      "dir_r,dir_t,dir_n,hamiltonian\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const AugmentedState& a = traj.states[i];
    const Control& c = traj.controls[i];
    csv += csv_double(units.years(traj.times[i]));
    const Vec6 x = a.x.to_vector();
    for (int j = 0; j < 6; ++j) csv += "," + csv_double(x[j]);
    csv += "," + csv_double(units.kg(a.m));
    for (int j = 0; j < 6; ++j) csv += "," + csv_double(a.costate.lambda[j]);
    csv += "," + csv_double(a.costate.lambda_m);
    csv += "," + csv_double(c.throttle);
    for (int j = 0; j < 3; ++j) csv += "," + csv_double(c.direction[j]);
    csv += "," + csv_double(hamiltonian(a, c, thrust)) + "\n";
  }
  write_text(out_dir / "nominal_trajectory.csv", csv);

  const double m_f = traj.states.back().m;
  out.tf_years = units.years(sol.unknowns.tf);
  out.propellant_kg = units.kg(problem.m0 - m_f);
  note(ctx, "nominal: tf = " + fixed(out.tf_years, 5) +
                " years, propellant = " + fixed(out.propellant_kg, 3) +
                " kg (restart " + std::to_string(sol.restart_index) + ")");
  return out;
}

GenerateOutcome cmd_generate(const Context& ctx, const fs::path& nominal,
                             const fs::path& out) {
  const RunConfig& cfg = ctx.config;
  const NominalArtifact nom = read_nominal(nominal);
  const PerturbationConfig pc = cfg.perturbation_config();
  const ThrustConfig thrust = cfg.thrust(pc.epsilon);
  const NominalTerminal terminal =
      nominal_terminal(nom.problem, nom.unknowns, thrust, pc.integrator);
  const Units units = cfg.units();

  DatasetHeader header;
  header.format = cfg.factory.format;
  header.mass_unit_kg = units.mass_kg;
  header.length_unit_m = units.length_m;
  header.time_unit_s = units.time_s;
  header.c1 = thrust.c1;
  header.c2 = thrust.c2;
  header.epsilon = pc.epsilon;
  header.rho = pc.rho;
  header.rho_l = pc.rho_l;
  header.seed = pc.seed;
  header.n_samples = static_cast<std::int64_t>(pc.n_samples);
  header.tf = terminal.tf;

  if (out.has_parent_path()) ensure_dir(out.parent_path());
  note(ctx, "generate: " + std::to_string(pc.n_trajectories) +
                " trajectories, rho = " + csv_double(pc.rho) + ", seed " +
                std::to_string(pc.seed));
  DatasetWriter writer(out, header);
  GenerateOutcome result;
  result.dataset = out;
  result.stats = run_factory(terminal, thrust, pc,
                             [&](Trajectory&& t) { writer.write(t); });
  writer.close();

  const FactoryStats& s = result.stats;
  // Wall time makes this the one non-reproducible file of a run.
  const json report{
      {"attempted", s.attempted},
      {"accepted", s.accepted},
      {"rejected_root", s.rejected_root},
      {"rejected_propagation", s.rejected_propagation},
      {"acceptance_rate", s.acceptance_rate()},
      {"wall_seconds", s.wall_seconds},
      {"trajectories_per_second", s.trajectories_per_second()},
      {"threads", pc.threads},
  };
  fs::path report_path = out;
  report_path += ".report.json";
  write_text(report_path, report.dump(2) + "\n");
  note(ctx, "generate: accepted " + std::to_string(s.accepted) + "/" +
                std::to_string(s.attempted) + " (rate " +
                fixed(s.acceptance_rate(), 4) + "), " +
                fixed(s.wall_seconds, 1) + " s, " +
                fixed(s.trajectories_per_second(), 2) + " trajectories/s");
  return result;
}

fs::path cmd_train(const Context& ctx, Task task, const fs::path& data,
                   const fs::path& out_prefix) {
  const TrainConfig tc = ctx.config.train_config(task);
  const Dataset ds = read_dataset(data);
  note(ctx, "train " + to_string(task) + ": " +
                std::to_string(ds.rows.size()) + " rows, " +
                std::to_string(tc.epochs) + " epochs");
  const auto t0 = std::chrono::steady_clock::now();
  const TrainedArtifact art = fit(ds, tc, [&](const EpochRecord& r) {
    note(ctx, "  epoch " + std::to_string(r.epoch) + "  train " +
                  csv_double(r.train_loss) + "  validation " +
                  csv_double(r.validation_loss) + "  (" +
                  fixed(seconds_since(t0), 1) + " s)");
  });
  if (out_prefix.has_parent_path()) ensure_dir(out_prefix.parent_path());
  save_artifact(art, out_prefix);
  note(ctx, "train " + to_string(task) + ": best epoch " +
                std::to_string(art.best_epoch) + ", validation loss " +
                csv_double(art.best_validation_loss));
  fs::path model = out_prefix;
  model += ".bin";
  return model;
}

std::vector<ClosedLoopRow> closed_loop(const Context& ctx,
                                       const NominalArtifact& nom,
                                       const LoadedModels& models) {
  const RunConfig& cfg = ctx.config;
  const ThrustConfig bang = cfg.thrust(0.0);
  const ThrustConfig nominal_thrust = cfg.thrust(nom.epsilon);
  const std::size_t n = cfg.evaluation.rollout_samples;
  IntegratorConfig ic;
  ic.rel_tol = cfg.evaluation.rollout_tolerance;
  ic.abs_tol = cfg.evaluation.rollout_tolerance;
  ic.max_steps = cfg.evaluation.rollout_max_steps;
  const GapCloseConfig gc = cfg.gap_close_config();
  const TransferProblem& p = nom.problem;
  const double tf = nom.unknowns.tf;

  const NominalTerminal terminal =
      nominal_terminal(p, nom.unknowns, nominal_thrust,
                       cfg.solver_config().integrator);
  Costate initial;
  initial.lambda = nom.unknowns.lambda0;
  initial.lambda_m = nom.unknowns.lambda_m0;
  const std::vector<Costate> base_hints{terminal.terminal.costate, initial};

  std::vector<ClosedLoopRow> rows;
  auto close = [&](RolloutResult r, std::vector<Costate> hints,
                   const Mlp* value_model) {
    ClosedLoopRow row;
    const auto t0 = std::chrono::steady_clock::now();
    if (r.completed) {
      if (value_model) {
        Vector in(7);
        in.head<6>() = r.states.back().to_vector();
        in[6] = r.masses.back();
        hints.insert(hints.begin(),
                     costate_of(value_model->input_gradient_one(in)));
      }
      row.gap = gap_close(r.states.back(), r.masses.back(), p.target, bang, gc,
                          hints);
    } else {
      row.gap.message = "rollout incomplete: " + r.error;
    }
    row.rollout = std::move(r);
    note(ctx, "  " + row.rollout.controller + ": spent " +
                  csv_double(row.rollout.propellant_spent) + ", residual " +
                  csv_double(row.rollout.terminal_residual) + ", correction " +
                  (row.gap.converged ? csv_double(row.gap.delta_m)
                                     : "failed (" + row.gap.message + ")") +
                  (row.gap.unknowns ? " over " +
                                          fixed(cfg.units().years(
                                                    row.gap.unknowns->tf),
                                                4) +
                                          " yr" +
                                          (row.gap.fixed_time ? " (fixed)"
                                                              : "")
                                    : std::string()) +
                  " (" + fixed(seconds_since(t0), 1) + " s)");
    rows.push_back(std::move(row));
  };

  close(replay_pmp(initial_state(nom.unknowns, p), tf, p.target,
                   nominal_thrust, n, cfg.solver_config().integrator),
        base_hints, nullptr);
  if (models.policy) {
    const PolicyNetController c(*models.policy, "N_u");
    close(rollout(c, p.x0, p.m0, tf, p.target, bang, n, ic), base_hints,
          nullptr);
  }
  if (models.value) {
    close(rollout_value_net(*models.value, "N_v", p.x0, p.m0, tf, p.target,
                            bang, n, ic),
          base_hints, &*models.value);
  }
  if (models.value_gradient) {
    close(rollout_value_net(*models.value_gradient, "N_grad_v", p.x0, p.m0,
                            tf, p.target, bang, n, ic),
          base_hints, &*models.value_gradient);
  }
  return rows;
}

LoadedModels load_models(const ModelPaths& paths) {
  LoadedModels m;
  if (paths.policy) m.policy = Mlp::load(*paths.policy);
  if (paths.value) m.value = Mlp::load(*paths.value);
  if (paths.value_gradient) m.value_gradient = Mlp::load(*paths.value_gradient);
  return m;
}

std::vector<ControlErrorReport> test_metrics(const Context& ctx,
                                             const LoadedModels& models,
                                             const Dataset& data) {
  const RunConfig& cfg = ctx.config;
  const Split split =
      split_by_trajectory(data, cfg.training.train_ratio,
                          cfg.training.validation_ratio, cfg.training.seed);
  const std::vector<TrajectorySample> test = select_rows(data, split.test);
  if (test.empty()) throw ConfigError("empty test split");
  const ThrustConfig bang = cfg.thrust(0.0);
  std::vector<ControlErrorReport> reports;
  if (models.policy) {
    reports.push_back(
        control_errors(PolicyNetController(*models.policy, "N_u"), test));
  }
  if (models.value) {
    reports.push_back(
        control_errors(ValueNetController(*models.value, bang, "N_v"), test));
    add_value_error(reports.back(), *models.value, test);
  }
  if (models.value_gradient) {
    reports.push_back(control_errors(
        ValueNetController(*models.value_gradient, bang, "N_grad_v"), test));
    add_value_error(reports.back(), *models.value_gradient, test);
  }
  return reports;
}

void cmd_evaluate(const Context& ctx, const ModelPaths& paths,
                  const fs::path& data, const fs::path& nominal,
                  const fs::path& out_dir) {
  const Units units = ctx.config.units();
  const LoadedModels models = load_models(paths);
  const NominalArtifact nom = read_nominal(nominal);
  const Dataset ds = read_dataset(data);
  ensure_dir(out_dir);

  note(ctx, "evaluate: test-set metrics");
  const std::vector<ControlErrorReport> reports =
      test_metrics(ctx, models, ds);
  static const char* kComponents[4] = {"throttle", "dir_r", "dir_t", "dir_n"};
  std::string metrics = "controller,space,component,mae,std,samples\n";
  json summary = json::object();
  for (const ControlErrorReport& r : reports) {
    for (int space = 0; space < 2; ++space) {
      const auto& stats = space == 0 ? r.physical : r.scaled;
      for (std::size_t i = 0; i < 4; ++i) {
        metrics += r.controller + "," + (space == 0 ? "physical" : "scaled") +
                   "," + kComponents[i] + "," + csv_double(stats[i].mean) +
                   "," + csv_double(stats[i].std) + "," +
                   std::to_string(r.samples) + "\n";
      }
    }
    if (r.value) {
      metrics += r.controller + ",value,value," + csv_double(r.value->mean) +
                 "," + csv_double(r.value->std) + "," +
                 std::to_string(r.samples) + "\n";
    }
    summary["metrics"][r.controller] = {
        {"throttle_mae", r.physical[0].mean},
        {"value_mae", r.value ? json(r.value->mean) : json(nullptr)}};
  }
  write_text(out_dir / "metrics.csv", metrics);

  note(ctx, "evaluate: closed-loop rollouts and corrections");
  const std::vector<ClosedLoopRow> rows = closed_loop(ctx, nom, models);
  std::string gap =
      "controller,rollout_completed,extraction_epsilon,propellant_spent_kg,"
      "terminal_orbit_distance,correction_converged,correction_fixed_time,"
      "correction_tf_years,correction_kg,total_kg,excess_over_optimal_kg\n";
  const double optimal_total =
      rows.front().rollout.propellant_spent + rows.front().gap.delta_m;
  for (const ClosedLoopRow& row : rows) {
    const RolloutResult& r = row.rollout;
    write_rollout_csv(out_dir / ("rollout_" + r.controller + ".csv"), r,
                      units);
    const bool ok = row.gap.converged;
    const double total = r.propellant_spent + row.gap.delta_m;
    gap += r.controller + "," + (r.completed ? "1" : "0") + "," +
           (r.extraction_epsilon ? csv_double(*r.extraction_epsilon) : "") +
           "," + csv_double(units.kg(r.propellant_spent)) + "," +
           csv_double(r.terminal_residual) + "," + (ok ? "1" : "0") + "," +
           (row.gap.fixed_time ? "1" : "0") + "," +
           (row.gap.unknowns ? csv_double(units.years(row.gap.unknowns->tf))
                             : "") +
           "," + (ok ? csv_double(units.kg(row.gap.delta_m)) : "") + "," +
           (ok ? csv_double(units.kg(total)) : "") + "," +
           (ok ? csv_double(units.kg(total - optimal_total)) : "") + "\n";
    summary["closed_loop"][r.controller] = {
        {"propellant_spent_kg", units.kg(r.propellant_spent)},
        {"terminal_orbit_distance", r.terminal_residual},
        {"correction_converged", ok},
        {"correction_fixed_time", row.gap.fixed_time},
        {"total_kg", ok ? json(units.kg(total)) : json(nullptr)}};
  }
  write_text(out_dir / "gap_close.csv", gap);
  write_text(out_dir / "evaluation.json", summary.dump(2) + "\n");
}

int exit_code_for(const Error& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->code();
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ConvergenceError*>(&e)) return kExitConvergence;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitFailure;
}

RolloutKind rollout_kind_from_string(const std::string& name) {
  if (name == "optimal") return RolloutKind::kOptimal;
  if (name == "policy") return RolloutKind::kPolicy;
  if (name == "value") return RolloutKind::kValue;
  throw ConfigError("unknown controller '" + name +
                    "' (expected optimal, policy or value)");
}

void cmd_rollout(const Context& ctx, RolloutKind kind,
                 const std::optional<fs::path>& model, const fs::path& nominal,
                 const fs::path& out_csv) {
  const RunConfig& cfg = ctx.config;
  const NominalArtifact nom = read_nominal(nominal);
  const TransferProblem& p = nom.problem;
  const std::size_t n = cfg.evaluation.rollout_samples;
  IntegratorConfig ic;
  ic.rel_tol = cfg.evaluation.rollout_tolerance;
  ic.abs_tol = cfg.evaluation.rollout_tolerance;
  ic.max_steps = cfg.evaluation.rollout_max_steps;
  if (kind != RolloutKind::kOptimal && !model) {
    throw ConfigError("--model is required for this controller");
  }
  RolloutResult r;
  switch (kind) {
    case RolloutKind::kOptimal:
      r = replay_pmp(initial_state(nom.unknowns, p), nom.unknowns.tf,
                     p.target, cfg.thrust(nom.epsilon), n,
                     cfg.solver_config().integrator);
      break;
    case RolloutKind::kPolicy:
      r = rollout(PolicyNetController(Mlp::load(*model), "N_u"), p.x0, p.m0,
                  nom.unknowns.tf, p.target, cfg.thrust(0.0), n, ic);
      break;
    case RolloutKind::kValue:
      r = rollout_value_net(Mlp::load(*model), model->stem().string(), p.x0,
                            p.m0, nom.unknowns.tf, p.target, cfg.thrust(0.0),
                            n, ic);
      break;
  }
  write_rollout_csv(out_csv, r, cfg.units());
  note(ctx, r.controller + ": spent " +
                fixed(cfg.units().kg(r.propellant_spent), 3) +
                " kg, terminal orbit distance " +
                csv_double(r.terminal_residual) +
                (r.completed ? "" : ", incomplete: " + r.error));
  if (!r.completed) throw PropagationError(r.error);
}

void cmd_pipeline(const Context& ctx) {
  const fs::path dir = ensure_dir(ctx.run_dir);
  write_text(dir / "config.ini", render_run_config(ctx.config));
  auto stage = [&](const std::string& name, const auto& fn) {
    note(ctx, "== " + name);
    try {
      fn();
    } catch (const Error& e) {
      write_manifest(dir);
      throw StageError(name, e);
    }
  };
  stage("nominal", [&] { cmd_nominal(ctx, dir); });
  const fs::path data =
      dir / (ctx.config.factory.format == DatasetFormat::kBinary
                 ? "dataset.bin"
                 : "dataset.csv");
  stage("generate", [&] { cmd_generate(ctx, dir / "nominal.json", data); });
  ModelPaths models;
  for (Task t : {Task::kPolicy, Task::kValue, Task::kValueGradient}) {
    const fs::path prefix = dir / "models" / to_string(t);
    stage("train " + to_string(t), [&] {
      const fs::path m = cmd_train(ctx, t, data, prefix);
      (t == Task::kPolicy  ? models.policy
       : t == Task::kValue ? models.value
                           : models.value_gradient) = m;
    });
  }
  stage("evaluate", [&] {
    cmd_evaluate(ctx, models, data, dir / "nominal.json", dir / "evaluation");
  });
  write_manifest(dir);
}

}  // namespace lowthrust::tools
