// Copyright 2026 The qcut Authors
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

// qcut: gamma tables, channel verification, cut-circuit estimation and
// Choi lower bounds from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcut/commands.hpp"

namespace {

struct Output {
  std::string path;
  std::string format = "json";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--out", path, "Write the report here instead of stdout");
    cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  }

  void write(const nlohmann::json& j) const {
    const std::string text = qcut::render(j, format);
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gate cutting with quasi-probability decompositions"};
  app.require_subcommand(1);

  // gamma
  auto* gamma = app.add_subcommand("gamma", "Sampling-overhead table for layers of identical RZZ gates");
  std::size_t n_min = 1, n_max = 4;
  std::string grid = "1.5707963267948966", tuple;
  Output gamma_out;
  gamma->add_option("--n-min", n_min, "Smallest number of gates")->capture_default_str();
  gamma->add_option("--n-max", n_max, "Largest number of gates")->capture_default_str();
  gamma->add_option("--theta", grid, "Angle grid: comma list or start:stop:count (radians)")->capture_default_str();
  gamma->add_option("--thetas", tuple, "One row for these per-gate angles (comma list)");
  gamma_out.add_to(gamma);

  // verify / estimate share scheme options
  std::string scheme = "joint";
  int alpha = 4;
  auto* verify = app.add_subcommand("verify", "Rebuild the channel from the decomposition and compare it to the circuit");
  std::string verify_path;
  Output verify_out;
  verify->add_option("circuit", verify_path, "Circuit JSON file")->required();
  verify->add_option("--scheme", scheme, "independent | joint | parallel")->capture_default_str();
  verify->add_option("--alpha", alpha, "Number of phases in cross terms (>= 3)")->capture_default_str();
  verify_out.add_to(verify);

  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo estimate of a diagonal observable through the cut");
  std::string estimate_path;
  qcut::EstimateConfig ecfg;
  Output estimate_out;
  estimate->add_option("circuit", estimate_path, "Circuit JSON file")->required();
  estimate->add_option("--observable", ecfg.observable, "parity | 'z i' | 'zz i j' | '0.5 z0 z1 + -0.5 z2'")
      ->capture_default_str();
  estimate->add_option("--scheme", scheme, "independent | joint | parallel")->capture_default_str();
  estimate->add_option("--alpha", alpha, "Number of phases in cross terms (>= 3)")->capture_default_str();
  estimate->add_option("--shots", ecfg.shots, "Number of shots")->capture_default_str()->check(CLI::PositiveNumber);
  estimate->add_option("--seed", ecfg.seed, "Seed")->capture_default_str();
  estimate->add_option("--workers", ecfg.workers, "Worker threads (results do not depend on this)")
      ->capture_default_str();
  estimate->add_flag("--timing", ecfg.timing, "Include wall-clock time in the report");
  estimate_out.add_to(estimate);

  auto* lower = app.add_subcommand("lowerbound", "Choi-state lower bound on gamma across the circuit's partition");
  std::string lower_path, builtin;
  Output lower_out;
  lower->add_option("circuit", lower_path, "Circuit JSON file");
  lower->add_option("--builtin", builtin, "toffoli (cut 1|2) or cnot (control|target)");
  lower_out.add_to(lower);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gamma->parsed()) {
      qcut::GammaConfig cfg;
      cfg.n_min = n_min;
      cfg.n_max = n_max;
      cfg.thetas = qcut::parse_angle_grid(grid);
      if (!tuple.empty()) cfg.tuple = qcut::parse_angle_grid(tuple);
      gamma_out.write(qcut::cmd_gamma(cfg));
    } else if (verify->parsed()) {
      verify_out.write(qcut::cmd_verify(qcut::load_circuit(verify_path), qcut::parse_scheme(scheme), alpha));
    } else if (estimate->parsed()) {
      ecfg.scheme = qcut::parse_scheme(scheme);
      ecfg.alpha = alpha;
      ecfg.max_qubits = qcut::max_qubits_from_env();
      estimate_out.write(qcut::cmd_estimate(qcut::load_circuit(estimate_path), ecfg));
    } else if (lower->parsed()) {
      if (lower_path.empty() == builtin.empty()) throw std::invalid_argument("lowerbound: give a circuit file or --builtin");
      lower_out.write(builtin.empty() ? qcut::cmd_lowerbound(qcut::load_circuit(lower_path))
                                      : qcut::cmd_lowerbound_builtin(builtin));
    }
  } catch (const std::exception& e) {
    std::cerr << "qcut: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
