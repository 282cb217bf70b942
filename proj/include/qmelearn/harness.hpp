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

// Experiment orchestration: JSON configuration, synthetic data generation
// with optional shot noise, initial-guess construction, end-to-end learning
// runs with reproducible artifacts, canned benchmark configurations, and the
// verification suite.

#pragma once

#include "qmelearn/learning.hpp"
#include "qmelearn/optimizer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmelearn {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string label;

  ModelSpec model;
  std::uint64_t true_seed = 1;

  // data generation
  double data_dt = 0.01;
  int data_order = 2;
  double delta_t = 0.1;
  int num_times = 10;
  double t_start = 0.0;
  ObservableSet observables = ObservableSet::one_local;
  long shots = 0;  // 0 = exact expectations
  std::string noise_model = "bernoulli";
  std::uint64_t data_seed = 2;

  // fitting
  SimOptions sim;
  double init_perturbation = 0.1;
  std::uint64_t init_seed = 3;
  LMOptions lm;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// |0...0><0...0|, every spin up.
Matrix all_up_state(int num_qubits);

// Exact expectations from the data-generation integrator; with shots > 0 each
// Pauli expectation is replaced by an N_S-shot estimate (the identity row is
// kept exact). bernoulli: mean of +-1 outcomes with p(+1) = (1+y)/2;
// gaussian: y + N(0, (1-y^2)/N_S). Deterministic per seed.
MeasurementDataset generate_data(const ExperimentConfig& config,
                                 const Eigen::VectorXd& theta_true);

// theta* plus a seeded Gaussian direction scaled to exactly `norm`.
Eigen::VectorXd initial_guess(const Eigen::VectorXd& theta_true, double norm,
                              std::uint64_t seed);

// Dataset file: one JSON header line (config echo, labels, seeds), then a
// CSV body `k,n,t,value` at 15 significant digits.
void write_dataset(const MeasurementDataset& data, const ExperimentConfig& config,
                   const std::string& path);
MeasurementDataset read_dataset(const std::string& path, ExperimentConfig* config_out = nullptr);

void write_expectations_csv(const Eigen::MatrixXd& values,
                            const std::vector<Observable>& observables,
                            double delta_t, double t_start, const std::string& path);

struct RunArtifacts {
  ExperimentConfig config;
  Eigen::VectorXd theta_true;
  Eigen::VectorXd theta_init;
  Eigen::VectorXd theta_hat;
  LMResult lm;
  RateReport rate;
  double initial_error = 0.0;      // ||theta0 - theta*||
  double final_rel_error = 0.0;    // ||theta_hat - theta*|| / ||theta*||
  double wall_seconds = 0.0;
};

// Generates data (or loads it when `dataset` is non-null), builds the initial
// guess, runs the fit, and writes dataset/history/summary artifacts when
// out_dir is non-empty.
RunArtifacts run_experiment(const ExperimentConfig& config, const std::string& out_dir = "",
                            const MeasurementDataset* dataset = nullptr);

void write_summary(const RunArtifacts& artifacts, const std::string& path);

// Canned configurations for the bundled benchmark experiments.
std::vector<std::string> experiment_ids();
ExperimentConfig experiment_config(const std::string& id);

// ---------------------------------------------------------------------------
// verification suite

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  bool orders = true;
  bool tpcp = true;
  bool sse = true;
  bool gradient = true;
  bool ehrenfest = true;
  bool mc_scaling = true;
};

std::vector<VerifyCheck> verify_suite(const VerifyOptions& opts = {});
bool all_pass(const std::vector<VerifyCheck>& checks);
void print_checks(const std::vector<VerifyCheck>& checks);
void write_verify_csv(const std::vector<VerifyCheck>& checks, const std::string& path);

}  // namespace qmelearn
