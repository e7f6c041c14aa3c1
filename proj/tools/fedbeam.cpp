// Copyright 2026 The fedbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fedbeam: experiment runner.
//
//   fedbeam synth --config exp.json [--out DIR] [--seed N]
//   fedbeam train --config exp.json [--out DIR] [--seed N] [--workers N] [--k-max N]
//   fedbeam eval  --checkpoint model.fbnn [--dataset test.fbds] [--config exp.json]
//                 [--out DIR] [--k-max N]
//   fedbeam flops [--config arch_or_experiment.json]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fedbeam/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::size_t k_max = 0;
  std::string checkpoint;
  std::string dataset;
};

void add_common(CLI::App* cmd, Flags& f, bool with_train_flags) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)");
  cmd->add_option("--out", f.out, "Output directory (must exist)");
  cmd->add_option("--seed", f.seed, "Base seed");
  if (with_train_flags) {
    cmd->add_option("--workers", f.workers, "Max concurrent clients");
    cmd->add_option("--k-max", f.k_max, "Largest K in the sweep");
  }
}

fedbeam::cli::Overrides overrides(const CLI::App* cmd, const Flags& f) {
  fedbeam::cli::Overrides o;
  if (cmd->count("--out")) o.out = f.out;
  if (cmd->count("--seed")) o.seed = f.seed;
  if (cmd->get_option_no_throw("--workers") && cmd->count("--workers")) {
    o.workers = f.workers;
  }
  if (cmd->get_option_no_throw("--k-max") && cmd->count("--k-max")) {
    o.k_max = f.k_max;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fedbeam;
  CLI::App app{"LIDAR-aided beam selection: synthetic data, central and "
               "federated training, evaluation"};
  app.require_subcommand(1);
  Flags f;

  auto* synth = app.add_subcommand("synth", "Generate synthetic train/test datasets");
  add_common(synth, f, false);
  synth->get_option("--config")->required();

  auto* train = app.add_subcommand("train", "Train and evaluate a model");
  add_common(train, f, true);
  train->get_option("--config")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval, f, true);
  eval->add_option("--checkpoint", f.checkpoint, "Model checkpoint")->required();
  eval->add_option("--dataset", f.dataset, "Dataset file to evaluate on");

  auto* flops = app.add_subcommand("flops", "Print parameter and FLOP counts");
  flops->add_option("--config", f.config, "Architecture or experiment JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }

  auto load = [&](CLI::App* cmd) -> std::optional<ExperimentConfig> {
    if (!cmd->count("--config")) return std::nullopt;
    return load_experiment(f.config);
  };

  if (*flops) {
    return cli::cmd_flops(flops->count("--config") ? std::optional(f.config)
                                                   : std::nullopt,
                          std::cout, std::cerr);
  }

  CLI::App* cmd = *synth ? synth : *train ? train : eval;
  std::optional<ExperimentConfig> cfg;
  const int rc = cli::guarded(
      [&] {
        cfg = load(cmd);
        return int{cli::kOk};
      },
      std::cerr);
  if (rc != cli::kOk) return rc;
  const auto o = overrides(cmd, f);

  if (cmd == synth) return cli::cmd_synth(*cfg, o, std::cout, std::cerr);
  if (cmd == train) return cli::cmd_train(*cfg, o, std::cout, std::cerr);
  return cli::cmd_eval(cfg, f.checkpoint,
                       eval->count("--dataset") ? std::optional(f.dataset)
                                                : std::nullopt,
                       o, std::cout, std::cerr);
}
