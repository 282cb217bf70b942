// Copyright 2026 The qmelearn authors
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

// Command line front end: simulate expectations, generate synthetic
// measurement data, fit model parameters, run stochastic trajectories,
// run the verification suite, and reproduce the bundled experiments.

#include "qmelearn/harness.hpp"
#include "qmelearn/sse.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace qmelearn;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig config = load_config(args.config_path);
  if (args.seed) {
    config.true_seed = *args.seed;
    config.data_seed = *args.seed + 1;
    config.init_seed = *args.seed + 2;
  }
  return config;
}

int cmd_simulate(const CommonArgs& args) {
  const ExperimentConfig config = load(args);
  const Eigen::VectorXd theta = random_true_model(config.true_seed, config.model);
  const LindbladOperators ops = build_operators(config.model, theta);
  const KrausMap map = config.sim.order == 1
                           ? KrausMap::first_order(ops, config.sim.dt)
                           : KrausMap::second_order(ops, config.sim.dt, config.sim.simplified);
  const auto observables = observable_basis(config.observables, config.model.num_qubits);
  const int stride = static_cast<int>(std::lround(config.delta_t / config.sim.dt));
  const int start = static_cast<int>(std::lround(config.t_start / config.sim.dt));
  const Eigen::MatrixXd y = evolve_expectations(map, all_up_state(config.model.num_qubits),
                                                observables, config.num_times, stride, start);
  std::filesystem::create_directories(args.out_dir);
  const auto path = std::filesystem::path(args.out_dir) / "expectations.csv";
  write_expectations_csv(y, observables, config.delta_t, config.t_start, path.string());
  std::printf("wrote %s (%d observables x %d times)\n", path.string().c_str(),
              static_cast<int>(y.rows()), static_cast<int>(y.cols()));
  return kExitOk;
}

int cmd_generate(const CommonArgs& args) {
  const ExperimentConfig config = load(args);
  const Eigen::VectorXd theta = random_true_model(config.true_seed, config.model);
  const MeasurementDataset data = generate_data(config, theta);
  std::filesystem::create_directories(args.out_dir);
  const auto dir = std::filesystem::path(args.out_dir);
  write_dataset(data, config, (dir / "dataset.csv").string());
  std::ofstream truth(dir / "theta_true.json");
  truth << parameters_to_json(config.model, theta);
  std::printf("wrote %s\n", (dir / "dataset.csv").string().c_str());
  return kExitOk;
}

int cmd_learn(const CommonArgs& args, const std::string& data_path) {
  const ExperimentConfig config = load(args);
  std::optional<MeasurementDataset> data;
  if (!data_path.empty()) data = read_dataset(data_path);
  const RunArtifacts artifacts =
      run_experiment(config, args.out_dir, data ? &*data : nullptr);
  std::printf("final phi %.3e | residual norm %.3e | rel param error %.3e | %s after %d "
              "accepted steps (%.1fs)\n",
              artifacts.lm.final_phi, artifacts.lm.final_residual_norm,
              artifacts.final_rel_error, to_string(artifacts.lm.stop).c_str(),
              artifacts.lm.accepted_count, artifacts.wall_seconds);
  return kExitOk;
}

int cmd_sse(const CommonArgs& args, long num_traj, double t_final) {
  const ExperimentConfig config = load(args);
  const Eigen::VectorXd theta = random_true_model(config.true_seed, config.model);
  const LindbladOperators ops = build_operators(config.model, theta);
  const int d = ops.dim();
  Vector psi0 = Vector::Zero(d);
  psi0(0) = 1.0;
  const int steps = static_cast<int>(std::lround(t_final / config.sim.dt));
  const auto result = mc_density(psi0, ops, config.sim.dt, steps, num_traj,
                                 config.sim.order, config.data_seed);
  std::filesystem::create_directories(args.out_dir);
  const auto path = std::filesystem::path(args.out_dir) / "sse_density.csv";
  std::ofstream out(path);
  out << "row,col,re,im,standard_error\n";
  char buf[160];
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.15g,%.15g,%.15g\n", i, j,
                    result.rho(i, j).real(), result.rho(i, j).imag(),
                    result.standard_error(i, j));
      out << buf;
    }
  }
  std::printf("wrote %s (%ld trajectories, %d steps)\n", path.string().c_str(), num_traj,
              steps);
  return kExitOk;
}

int cmd_verify(const VerifyOptions& opts, const std::string& out_dir) {
  const auto checks = verify_suite(opts);
  print_checks(checks);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_verify_csv(checks, (std::filesystem::path(out_dir) / "verify.csv").string());
  }
  const bool ok = all_pass(checks);
  std::printf("%zu checks, %s\n", checks.size(), ok ? "all passed" : "FAILURES PRESENT");
  return ok ? kExitOk : kExitFailure;
}

int cmd_reproduce(const std::string& id, const std::string& out_dir,
                  std::optional<std::uint64_t> seed) {
  ExperimentConfig config = experiment_config(id);
  if (seed) {
    config.true_seed = *seed;
    config.data_seed = *seed + 1;
    config.init_seed = *seed + 2;
  }
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir) / id;

  if (id == "fig1") {
    // accuracy comparison on one observable: both schemes at dt = 1e-2
    // against a fine-step reference, t in [0, 10]
    const Eigen::VectorXd theta = random_true_model(config.true_seed, config.model);
    const LindbladOperators ops = build_operators(config.model, theta);
    const std::vector<Observable> obs = {pauli_string({1}, {kAxisY}, config.model.num_qubits)};
    const Matrix rho0 = all_up_state(config.model.num_qubits);
    std::filesystem::create_directories(dir);
    struct Variant {
      const char* name;
      int order;
      double dt;
    };
    const Variant variants[] = {{"order1_dt1e-2.csv", 1, 1e-2},
                                {"order2_dt1e-2.csv", 2, 1e-2},
                                {"reference_dt1e-4.csv", 2, 1e-4}};
    for (const auto& v : variants) {
      const KrausMap map = v.order == 1 ? KrausMap::first_order(ops, v.dt)
                                        : KrausMap::second_order(ops, v.dt);
      const int stride = static_cast<int>(std::lround(0.1 / v.dt));
      const Eigen::MatrixXd y = evolve_expectations(map, rho0, obs, 100, stride);
      write_expectations_csv(y, obs, 0.1, 0.0, (dir / v.name).string());
      std::printf("wrote %s\n", (dir / v.name).string().c_str());
    }
    return kExitOk;
  }

  const RunArtifacts artifacts = run_experiment(config, dir.string());
  std::printf("%s: final rel param error %.3e, %s after %d accepted steps (%.1fs)\n",
              id.c_str(), artifacts.final_rel_error, to_string(artifacts.lm.stop).c_str(),
              artifacts.lm.accepted_count, artifacts.wall_seconds);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lindblad simulation and parameter learning"};
  app.require_subcommand(1);

  CommonArgs common;
  std::optional<std::uint64_t> seed_flag;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config) {
      cmd->add_option("--config", common.config_path, "experiment config (json)")
          ->required()
          ->check(CLI::ExistingFile);
    }
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--seed", seed_flag, "override the config seeds");
  };

  auto* simulate = app.add_subcommand("simulate", "simulate observable expectations");
  add_common(simulate);

  auto* generate = app.add_subcommand("generate-data", "generate a synthetic dataset");
  add_common(generate);

  auto* learn = app.add_subcommand("learn", "fit model parameters to a dataset");
  add_common(learn);
  std::string data_path;
  learn->add_option("--data", data_path, "existing dataset file (default: regenerate)")
      ->check(CLI::ExistingFile);

  auto* sse = app.add_subcommand("sse", "Monte Carlo trajectory estimate of the density");
  add_common(sse);
  long num_traj = 1000;
  double t_final = 1.0;
  sse->add_option("--trajectories", num_traj, "number of trajectories");
  sse->add_option("--t-final", t_final, "evolution time");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  std::string verify_out;
  std::vector<std::string> only;
  verify->add_option("--out", verify_out, "directory for the report csv");
  verify->add_option("--only", only,
                     "restrict to scopes: orders tpcp sse gradient ehrenfest mc");

  auto* reproduce = app.add_subcommand("reproduce", "run a bundled experiment");
  std::string figure_id;
  std::string repro_out = "out";
  reproduce->add_option("id", figure_id, "experiment id (see --list)");
  bool list_ids = false;
  reproduce->add_flag("--list", list_ids, "list experiment ids");
  reproduce->add_option("--out", repro_out, "output directory");
  reproduce->add_option("--seed", seed_flag, "override the config seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  common.seed = seed_flag;
  try {
    if (simulate->parsed()) return cmd_simulate(common);
    if (generate->parsed()) return cmd_generate(common);
    if (learn->parsed()) return cmd_learn(common, data_path);
    if (sse->parsed()) return cmd_sse(common, num_traj, t_final);
    if (verify->parsed()) {
      VerifyOptions opts;
      if (!only.empty()) {
        opts = VerifyOptions{false, false, false, false, false, false};
        for (const auto& scope : only) {
          if (scope == "orders") opts.orders = true;
          else if (scope == "tpcp") opts.tpcp = true;
          else if (scope == "sse") opts.sse = true;
          else if (scope == "gradient") opts.gradient = true;
          else if (scope == "ehrenfest") opts.ehrenfest = true;
          else if (scope == "mc") opts.mc_scaling = true;
          else throw ConfigError("unknown verify scope '" + scope + "'");
        }
      }
      return cmd_verify(opts, verify_out);
    }
    if (reproduce->parsed()) {
      if (list_ids) {
        for (const auto& id : experiment_ids()) std::printf("%s\n", id.c_str());
        return kExitOk;
      }
      if (figure_id.empty()) throw ConfigError("missing experiment id (try --list)");
      return cmd_reproduce(figure_id, repro_out, seed_flag);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitConfig;
}
