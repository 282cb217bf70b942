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

#include "qmelearn/harness.hpp"

#include "qmelearn/rng.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace qmelearn {

namespace {

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  return buf;
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json doc;
  doc["schema_version"] = c.schema_version;
  doc["label"] = c.label;
  doc["model"] = {{"family", to_string(c.model.family)},
                  {"num_qubits", c.model.num_qubits},
                  {"mode", to_string(c.model.mode)}};
  doc["true_seed"] = c.true_seed;
  doc["data"] = {{"dt", c.data_dt},       {"order", c.data_order},
                 {"delta_t", c.delta_t},  {"num_times", c.num_times},
                 {"t_start", c.t_start},  {"observables", to_string(c.observables)},
                 {"shots", c.shots},      {"noise_model", c.noise_model},
                 {"seed", c.data_seed}};
  doc["fit"] = {{"dt", c.sim.dt}, {"order", c.sim.order}, {"simplified", c.sim.simplified}};
  doc["init"] = {{"perturbation", c.init_perturbation}, {"seed", c.init_seed}};
  doc["lm"] = {{"max_iterations", c.lm.max_iterations},
               {"grad_tolerance", c.lm.grad_tolerance},
               {"step_tolerance", c.lm.step_tolerance},
               {"nu_scale", c.lm.nu_scale},
               {"max_backtracks", c.lm.max_backtracks}};
  return doc;
}

ExperimentConfig config_from(const nlohmann::json& doc) {
  ExperimentConfig c;
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != 1) {
      throw ConfigError("unsupported schema_version " + std::to_string(version));
    }
    c.schema_version = version;
    if (doc.contains("label")) c.label = doc.at("label").get<std::string>();
    const auto& model = doc.at("model");
    c.model.family = family_from_string(model.at("family").get<std::string>());
    c.model.num_qubits = model.at("num_qubits").get<int>();
    if (model.contains("mode")) {
      c.model.mode = mode_from_string(model.at("mode").get<std::string>());
    }
    if (c.model.num_qubits < 1 || c.model.num_qubits > 8) {
      throw ConfigError("num_qubits must be in [1, 8]");
    }
    c.true_seed = doc.value("true_seed", c.true_seed);
    if (doc.contains("data")) {
      const auto& data = doc.at("data");
      c.data_dt = data.value("dt", c.data_dt);
      c.data_order = data.value("order", c.data_order);
      c.delta_t = data.value("delta_t", c.delta_t);
      c.num_times = data.value("num_times", c.num_times);
      c.t_start = data.value("t_start", c.t_start);
      if (data.contains("observables")) {
        c.observables = observable_set_from_string(data.at("observables").get<std::string>());
      }
      c.shots = data.value("shots", c.shots);
      c.noise_model = data.value("noise_model", c.noise_model);
      c.data_seed = data.value("seed", c.data_seed);
    }
    if (doc.contains("fit")) {
      const auto& fit = doc.at("fit");
      c.sim.dt = fit.value("dt", c.sim.dt);
      c.sim.order = fit.value("order", c.sim.order);
      c.sim.simplified = fit.value("simplified", c.sim.simplified);
    }
    if (doc.contains("init")) {
      const auto& init = doc.at("init");
      c.init_perturbation = init.value("perturbation", c.init_perturbation);
      c.init_seed = init.value("seed", c.init_seed);
    }
    if (doc.contains("lm")) {
      const auto& lm = doc.at("lm");
      c.lm.max_iterations = lm.value("max_iterations", c.lm.max_iterations);
      c.lm.grad_tolerance = lm.value("grad_tolerance", c.lm.grad_tolerance);
      c.lm.step_tolerance = lm.value("step_tolerance", c.lm.step_tolerance);
      c.lm.nu_scale = lm.value("nu_scale", c.lm.nu_scale);
      c.lm.max_backtracks = lm.value("max_backtracks", c.lm.max_backtracks);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (c.data_dt <= 0 || c.sim.dt <= 0 || c.delta_t <= 0) {
    throw ConfigError("time steps must be positive");
  }
  if (c.num_times < 1) throw ConfigError("num_times must be >= 1");
  if (c.shots < 0) throw ConfigError("shots must be >= 0");
  if (c.noise_model != "bernoulli" && c.noise_model != "gaussian") {
    throw ConfigError("noise_model must be 'bernoulli' or 'gaussian'");
  }
  if (c.data_order != 1 && c.data_order != 2) throw ConfigError("data order must be 1 or 2");
  if (c.sim.order != 1 && c.sim.order != 2) throw ConfigError("fit order must be 1 or 2");
  return c;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from(doc);
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

Matrix all_up_state(int num_qubits) {
  const int d = qubit_dimension(num_qubits);
  Matrix rho = Matrix::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

MeasurementDataset generate_data(const ExperimentConfig& config,
                                 const Eigen::VectorXd& theta_true) {
  MeasurementDataset data;
  data.observables = observable_basis(config.observables, config.model.num_qubits);
  data.delta_t = config.delta_t;
  data.num_times = config.num_times;
  data.t_start = config.t_start;
  data.shots = config.shots;
  data.noise_model = config.noise_model;
  data.seed = config.data_seed;
  data.rho0 = all_up_state(config.model.num_qubits);

  SimOptions gen;
  gen.order = config.data_order;
  gen.dt = config.data_dt;
  MeasurementDataset exact = data;
  exact.shots = 0;
  exact.values = Eigen::MatrixXd::Zero(data.num_observables(), data.num_times);
  FitProblem generator(config.model, exact, gen);
  const Eigen::VectorXd r = generator.residuals(theta_true);
  Eigen::MatrixXd values(data.num_observables(), data.num_times);
  for (int k = 0; k < data.num_observables(); ++k)
    for (int n = 1; n <= data.num_times; ++n)
      values(k, n - 1) = r(generator.residual_index(k, n));

  if (config.shots > 0) {
    auto rng = seeded_engine(config.data_seed);
    for (int k = 0; k < data.num_observables(); ++k) {
      const bool is_identity = data.observables[k].label == "I";
      for (int n = 0; n < data.num_times; ++n) {
        const double y = values(k, n);
        if (std::abs(y) > 1.0 + 1e-8 && !is_identity) {
          throw std::runtime_error("expectation " + fmt(y) +
                                   " outside [-1, 1]; integrator output is not a valid "
                                   "Pauli expectation");
        }
        if (is_identity) continue;  // deterministic outcome, kept exact
        if (config.noise_model == "bernoulli") {
          const double p = std::min(1.0, std::max(0.0, 0.5 * (1.0 + y)));
          std::binomial_distribution<long> bin(config.shots, p);
          const long ups = bin(rng);
          values(k, n) = 2.0 * static_cast<double>(ups) / config.shots - 1.0;
        } else {
          const double var = std::max(0.0, (1.0 - y * y) / config.shots);
          std::normal_distribution<double> gauss(0.0, std::sqrt(var));
          values(k, n) = y + gauss(rng);
        }
      }
    }
  }
  data.values = values;
  return data;
}

Eigen::VectorXd initial_guess(const Eigen::VectorXd& theta_true, double norm,
                              std::uint64_t seed) {
  auto rng = seeded_engine(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd direction(theta_true.size());
  for (int i = 0; i < direction.size(); ++i) direction(i) = unit(rng);
  direction *= norm / direction.norm();
  return theta_true + direction;
}

void write_dataset(const MeasurementDataset& data, const ExperimentConfig& config,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  nlohmann::json header = config_json(config);
  std::vector<std::string> labels;
  for (const auto& obs : data.observables) labels.push_back(obs.label);
  header["observable_labels"] = labels;
  out << header.dump() << "\n";
  out << "k,n,t,value\n";
  for (int k = 0; k < data.num_observables(); ++k) {
    for (int n = 1; n <= data.num_times; ++n) {
      out << k << "," << n << "," << fmt(data.time_at(n)) << ","
          << fmt(data.values(k, n - 1)) << "\n";
    }
  }
}

MeasurementDataset read_dataset(const std::string& path, ExperimentConfig* config_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset file is empty");
  const ExperimentConfig config = config_from_json(line);
  if (config_out) *config_out = config;

  MeasurementDataset data;
  data.observables = observable_basis(config.observables, config.model.num_qubits);
  data.delta_t = config.delta_t;
  data.num_times = config.num_times;
  data.t_start = config.t_start;
  data.shots = config.shots;
  data.noise_model = config.noise_model;
  data.seed = config.data_seed;
  data.rho0 = all_up_state(config.model.num_qubits);
  data.values = Eigen::MatrixXd::Zero(data.num_observables(), data.num_times);

  if (!std::getline(in, line) || line != "k,n,t,value") {
    throw std::runtime_error("dataset file is missing its csv header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int k = 0, n = 0;
    double t = 0, value = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &k, &n, &t, &value) != 4) {
      throw std::runtime_error("bad dataset row: " + line);
    }
    if (k < 0 || k >= data.num_observables() || n < 1 || n > data.num_times) {
      throw std::runtime_error("dataset row out of range: " + line);
    }
    data.values(k, n - 1) = value;
  }
  return data;
}

void write_expectations_csv(const Eigen::MatrixXd& values,
                            const std::vector<Observable>& observables,
                            double delta_t, double t_start, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "t,observable,value\n";
  for (int n = 0; n < values.cols(); ++n) {
    const double t = t_start + (n + 1) * delta_t;
    for (int k = 0; k < values.rows(); ++k) {
      out << fmt(t) << "," << observables[k].label << "," << fmt(values(k, n)) << "\n";
    }
  }
}

RunArtifacts run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                            const MeasurementDataset* dataset) {
  const auto t0 = std::chrono::steady_clock::now();
  RunArtifacts artifacts;
  artifacts.config = config;
  artifacts.theta_true = random_true_model(config.true_seed, config.model);
  const MeasurementDataset data =
      dataset != nullptr ? *dataset : generate_data(config, artifacts.theta_true);
  artifacts.theta_init =
      initial_guess(artifacts.theta_true, config.init_perturbation, config.init_seed);
  artifacts.initial_error = (artifacts.theta_init - artifacts.theta_true).norm();

  FitProblem problem(config.model, data, config.sim);
  LeastSquaresCallbacks callbacks;
  callbacks.residuals = [&](const Eigen::VectorXd& th) { return problem.residuals(th); };
  callbacks.jacobian = [&](const Eigen::VectorXd& th) { return problem.jacobian(th); };
  LMOptions opts = config.lm;
  opts.objective_scale = problem.objective_scale();
  artifacts.lm = lm_run(artifacts.theta_init, callbacks, opts, &artifacts.theta_true);
  artifacts.theta_hat = artifacts.lm.theta;
  artifacts.rate = rate_diagnostics(artifacts.lm.history);
  artifacts.final_rel_error =
      (artifacts.theta_hat - artifacts.theta_true).norm() / artifacts.theta_true.norm();
  artifacts.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    write_dataset(data, config, (dir / "dataset.csv").string());
    write_history_csv(artifacts.lm.history, (dir / "history.csv").string());
    std::ofstream truth(dir / "theta_true.json");
    truth << parameters_to_json(config.model, artifacts.theta_true);
    std::ofstream hat(dir / "theta_hat.json");
    hat << parameters_to_json(config.model, artifacts.theta_hat);
    write_summary(artifacts, (dir / "summary.json").string());
  }
  return artifacts;
}

void write_summary(const RunArtifacts& artifacts, const std::string& path) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["config"] = config_json(artifacts.config);
  doc["initial_error"] = artifacts.initial_error;
  doc["final_phi"] = artifacts.lm.final_phi;
  doc["final_residual_norm"] = artifacts.lm.final_residual_norm;
  doc["final_rel_param_error"] = artifacts.final_rel_error;
  doc["iterations"] = static_cast<int>(artifacts.lm.history.size()) - 1;
  doc["accepted_iterations"] = artifacts.lm.accepted_count;
  doc["stop_reason"] = to_string(artifacts.lm.stop);
  doc["stagnated"] = artifacts.lm.stagnated;
  if (artifacts.rate.has_order) {
    doc["rate_order"] = artifacts.rate.order;
    doc["rate_pairs"] = artifacts.rate.pairs_used;
  }
  doc["wall_seconds"] = artifacts.wall_seconds;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << doc.dump(2) << "\n";
}

std::vector<std::string> experiment_ids() {
  return {"fig1", "fig2-1local", "fig2-2local", "fig3", "fig4",
          "fig5-1local", "fig5-2local", "fig6"};
}

ExperimentConfig experiment_config(const std::string& id) {
  ExperimentConfig c;
  c.label = id;
  c.model.num_qubits = 6;
  c.model.family = ModelFamily::linear_dissipator;
  c.model.mode = DissipativeMode::amplitude;
  c.true_seed = 20260801;
  c.data_seed = 11;
  c.init_seed = 7;
  c.data_dt = 0.01;
  c.data_order = 2;
  c.sim.dt = 0.01;
  c.sim.order = 2;
  c.delta_t = 0.1;
  c.num_times = 10;
  c.observables = ObservableSet::one_local;
  c.init_perturbation = 0.3658;
  c.lm.max_iterations = 60;

  if (id == "fig1") {
    // simulation accuracy comparison; the learn fields are unused
    return c;
  }
  if (id == "fig2-1local") return c;
  if (id == "fig2-2local") {
    c.observables = ObservableSet::two_local;
    return c;
  }
  if (id == "fig3") {
    c.delta_t = 0.01;
    c.num_times = 100;
    return c;
  }
  if (id == "fig4") {
    c.t_start = 4.0;
    return c;
  }
  c.model.family = ModelFamily::pauli_jump;
  c.init_perturbation = 0.4529;
  if (id == "fig5-1local") return c;
  if (id == "fig5-2local") {
    c.observables = ObservableSet::two_local;
    return c;
  }
  if (id == "fig6") {
    c.observables = ObservableSet::xy_one_local;
    c.lm.max_iterations = 25;
    return c;
  }
  throw ConfigError("unknown experiment id '" + id + "'; known ids: fig1, fig2-1local, "
                    "fig2-2local, fig3, fig4, fig5-1local, fig5-2local, fig6");
}

bool all_pass(const std::vector<VerifyCheck>& checks) {
  for (const auto& check : checks) {
    if (!check.pass) return false;
  }
  return true;
}

void print_checks(const std::vector<VerifyCheck>& checks) {
  for (const auto& check : checks) {
    std::printf("[%s] %-38s value %-12.5g window [%g, %g]  %s\n",
                check.pass ? "PASS" : "FAIL", check.name.c_str(), check.value, check.lo,
                check.hi, check.detail.c_str());
  }
}

void write_verify_csv(const std::vector<VerifyCheck>& checks, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "name,value,lo,hi,pass\n";
  for (const auto& check : checks) {
    out << check.name << "," << fmt(check.value) << "," << fmt(check.lo) << ","
        << fmt(check.hi) << "," << (check.pass ? 1 : 0) << "\n";
  }
}

}  // namespace qmelearn
