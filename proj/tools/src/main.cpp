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

// lowthrust: nominal transfer, dataset generation, training and evaluation.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using lowthrust::Task;
using lowthrust::tools::Context;
namespace fs = std::filesystem;
namespace tools = lowthrust::tools;

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

void require_file(const fs::path& p, const std::string& flag) {
  if (!fs::exists(p)) {
    throw lowthrust::IoError(flag + ": no such file " + p.string());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-thrust Earth to Venus transfers and neural controllers"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string run_dir;
  int threads = 0;
  bool show_config = false;
  bool dry_run = false;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "INI run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--run-dir", run_dir,
                 "output directory (default $LOWTHRUST_RUN_DIR or ./run)");
  app.add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
  app.add_flag("--show-config", show_config,
               "print the effective configuration and exit");
  app.add_flag("--dry-run", dry_run, "validate configuration and inputs only");
  app.add_flag("-q,--quiet", quiet, "no progress output");

  // nominal
  auto* nominal = app.add_subcommand("nominal", "solve the nominal transfer");
  std::string nominal_out, epoch;
  int restarts = 0;
  nominal->add_option("--out", nominal_out, "output directory");
  nominal->add_option("--epoch", epoch, "launch date YYYY-MM-DD");
  nominal->add_option("--restarts", restarts)->check(CLI::PositiveNumber);

  // generate
  auto* generate = app.add_subcommand("generate", "backward-generate a dataset");
  std::string gen_nominal, gen_out;
  std::size_t gen_n = 0;
  double gen_rho = -1.0;
  std::uint64_t gen_seed = 0;
  bool gen_seed_set = false, binary = false, csv = false;
  generate->add_option("--nominal", gen_nominal, "nominal.json");
  generate->add_option("--out", gen_out, "dataset path");
  generate->add_option("--n", gen_n, "trajectories")->check(CLI::PositiveNumber);
  generate->add_option("--rho", gen_rho, "co-state perturbation radius");
  generate->add_option("--seed", gen_seed)->each([&](const std::string&) {
    gen_seed_set = true;
  });
  auto* bin_flag = generate->add_flag("--binary", binary, "binary rows");
  generate->add_flag("--csv", csv, "CSV rows")->excludes(bin_flag);

  // train
  auto* train = app.add_subcommand("train", "fit one network");
  std::string task_name, train_data, train_out;
  int epochs = 0;
  std::uint64_t train_seed = 0;
  bool train_seed_set = false;
  train->add_option("--task", task_name, "policy, value or value-gradient")
      ->required();
  train->add_option("--data", train_data, "dataset path");
  train->add_option("--out", train_out, "model path prefix");
  train->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
  train->add_option("--seed", train_seed)->each([&](const std::string&) {
    train_seed_set = true;
  });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "test metrics and rollouts");
  std::string models_dir, eval_data, eval_nominal, eval_out;
  std::string policy_path, value_path, value_gradient_path;
  evaluate->add_option("--models", models_dir,
                       "directory holding policy.bin, value.bin and "
                       "value-gradient.bin");
  evaluate->add_option("--policy", policy_path);
  evaluate->add_option("--value", value_path);
  evaluate->add_option("--value-gradient", value_gradient_path);
  evaluate->add_option("--data", eval_data, "dataset path");
  evaluate->add_option("--nominal", eval_nominal, "nominal.json");
  evaluate->add_option("--out", eval_out, "output directory");

  // rollout
  auto* roll = app.add_subcommand("rollout", "one closed-loop rollout");
  std::string controller = "optimal", roll_model, roll_nominal, roll_out;
  roll->add_option("--controller", controller, "optimal, policy or value");
  roll->add_option("--model", roll_model, "network for policy or value");
  roll->add_option("--nominal", roll_nominal, "nominal.json");
  roll->add_option("--out", roll_out, "CSV path");

  auto* pipeline =
      app.add_subcommand("pipeline", "nominal, generate, train x3, evaluate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? tools::kExitOk : tools::kExitConfig;
  }

  try {
    Context ctx;
    if (const char* env = std::getenv("LOWTHRUST_RUN_DIR"); env && *env) {
      ctx.config.paths.run_dir = env;
    }
    if (!config_path.empty()) {
      const std::string env_dir = ctx.config.paths.run_dir;
      ctx.config = lowthrust::load_run_config(config_path);
      if (ctx.config.paths.run_dir == lowthrust::RunConfig{}.paths.run_dir) {
        ctx.config.paths.run_dir = env_dir;
      }
    }
    lowthrust::RunConfig& cfg = ctx.config;
    if (!run_dir.empty()) cfg.paths.run_dir = run_dir;
    if (threads > 0) cfg.threads = threads;
    if (!epoch.empty()) cfg.mission.epoch = epoch;
    if (restarts > 0) cfg.solver.restarts = restarts;
    if (gen_n > 0) cfg.factory.n_trajectories = gen_n;
    if (gen_rho >= 0.0) cfg.factory.rho = gen_rho;
    if (gen_seed_set) cfg.factory.seed = gen_seed;
    if (binary) cfg.factory.format = lowthrust::DatasetFormat::kBinary;
    if (csv) cfg.factory.format = lowthrust::DatasetFormat::kCsv;
    if (epochs > 0) cfg.training.epochs = epochs;
    if (train_seed_set) cfg.training.seed = train_seed;
    ctx.run_dir = cfg.paths.run_dir;
    ctx.log = quiet ? nullptr : &std::cerr;

    if (show_config) {
      std::cout << lowthrust::render_run_config(cfg);
      return tools::kExitOk;
    }
    lowthrust::validate(cfg);

    const fs::path dir = ctx.run_dir;
    const fs::path default_data =
        dir / (cfg.factory.format == lowthrust::DatasetFormat::kBinary
                   ? "dataset.bin"
                   : "dataset.csv");
    const fs::path default_nominal = dir / "nominal.json";

    if (*nominal) {
      if (dry_run) return tools::kExitOk;
      const auto out = tools::cmd_nominal(ctx, or_default(nominal_out, dir));
      std::cout << "tf_years " << out.tf_years << "\npropellant_kg "
                << out.propellant_kg << "\n";
    } else if (*generate) {
      const fs::path nom = or_default(gen_nominal, default_nominal);
      require_file(nom, "--nominal");
      if (dry_run) return tools::kExitOk;
      const auto out =
          tools::cmd_generate(ctx, nom, or_default(gen_out, default_data));
      std::cout << "accepted " << out.stats.accepted << "\nattempted "
                << out.stats.attempted << "\n";
    } else if (*train) {
      const Task task = lowthrust::task_from_string(task_name);
      const fs::path data = or_default(train_data, default_data);
      require_file(data, "--data");
      if (dry_run) return tools::kExitOk;
      const fs::path model = tools::cmd_train(
          ctx, task, data,
          or_default(train_out, dir / "models" / lowthrust::to_string(task)));
      std::cout << model.string() << "\n";
    } else if (*evaluate) {
      tools::ModelPaths models;
      const fs::path mdir = or_default(models_dir, dir / "models");
      auto pick = [&](const std::string& given, const char* name,
                      std::optional<fs::path>& slot) {
        const fs::path p = or_default(given, mdir / name);
        if (!given.empty() || fs::exists(p)) {
          require_file(p, "model");
          slot = p;
        }
      };
      pick(policy_path, "policy.bin", models.policy);
      pick(value_path, "value.bin", models.value);
      pick(value_gradient_path, "value-gradient.bin", models.value_gradient);
      if (!models.policy && !models.value && !models.value_gradient) {
        throw lowthrust::ConfigError("no models found in " + mdir.string());
      }
      const fs::path data = or_default(eval_data, default_data);
      const fs::path nom = or_default(eval_nominal, default_nominal);
      require_file(data, "--data");
      require_file(nom, "--nominal");
      if (dry_run) return tools::kExitOk;
      tools::cmd_evaluate(ctx, models, data, nom,
                          or_default(eval_out, dir / "evaluation"));
    } else if (*roll) {
      const auto kind = tools::rollout_kind_from_string(controller);
      const fs::path nom = or_default(roll_nominal, default_nominal);
      require_file(nom, "--nominal");
      std::optional<fs::path> model;
      if (!roll_model.empty()) {
        require_file(roll_model, "--model");
        model = roll_model;
      }
      if (dry_run) return tools::kExitOk;
      tools::cmd_rollout(
          ctx, kind, model, nom,
          or_default(roll_out, dir / ("rollout_" + controller + ".csv")));
    } else if (*pipeline) {
      if (dry_run) return tools::kExitOk;
      tools::cmd_pipeline(ctx);
      return tools::kExitOk;
    }
    if (fs::is_directory(dir)) tools::write_manifest(dir);
    return tools::kExitOk;
  } catch (const lowthrust::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tools::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tools::kExitFailure;
  }
}
