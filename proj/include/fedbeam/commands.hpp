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

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedbeam/config.hpp"
#include "fedbeam/dataset.hpp"
#include "fedbeam/encoded.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/evaluate.hpp"
#include "fedbeam/fedavg.hpp"
#include "fedbeam/ingest.hpp"
#include "fedbeam/monte_carlo.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/nn/checkpoint.hpp"
#include "fedbeam/report.hpp"
#include "fedbeam/synthetic.hpp"
#include "fedbeam/training.hpp"

namespace fedbeam::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kNumericError = 4,
};

// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> k_max;
};

inline void apply(ExperimentConfig& cfg, const Overrides& o) {
  if (o.out) cfg.output_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.federated.workers = *o.workers;
  if (o.k_max) {
    if (*o.k_max < 1) throw ConfigError("--k-max", "must be >= 1");
    cfg.k_max = *o.k_max;
  }
}

inline void require_output_dir(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("output_dir", "directory does not exist: " + dir);
  }
}

// Runs f and maps library errors onto exit codes, printing the diagnostic.
template <typename F>
int guarded(F&& f, std::ostream& err) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

inline double label_entropy_bits(const Dataset& ds) {
  if (ds.empty()) return 0.0;
  std::map<BeamLabel, std::size_t> hist;
  for (const auto& s : ds.samples) ++hist[s.label];
  double h = 0.0;
  for (const auto& [label, n] : hist) {
    const double p = static_cast<double>(n) / static_cast<double>(ds.size());
    h -= p * std::log2(p);
  }
  return h;
}

inline std::uint64_t synthetic_seed(const SyntheticSource& src, std::uint64_t base) {
  return src.seed.value_or(base);
}

struct LoadedData {
  Dataset train;
  Dataset test;
};

inline LoadedData load_data(const ExperimentConfig& cfg, std::ostream& log) {
  LoadedData d;
  if (const auto* syn = std::get_if<SyntheticSource>(&cfg.dataset)) {
    const auto seed = synthetic_seed(*syn, cfg.seed);
    d.train = generate_synthetic(syn->scene, syn->train_samples, seed);
    d.test = generate_synthetic(syn->scene, syn->test_samples,
                                derive_seed(seed, streams::kScene, ~0ULL));
  } else if (const auto* files = std::get_if<FileSource>(&cfg.dataset)) {
    d.train = load_dataset(files->train);
    d.test = load_dataset(files->test);
  } else {
    const auto& ing = std::get<IngestSource>(cfg.dataset);
    auto train = ingest_external(ing.train_dir, ing.spec);
    auto test = ingest_external(ing.test_dir, ing.spec);
    if (train.skipped + test.skipped > 0) {
      log << "ingest: skipped " << train.skipped << " train and " << test.skipped
          << " test samples\n";
    }
    d.train = std::move(train.dataset);
    d.test = std::move(test.dataset);
  }
  if (!(d.train.meta.tx_beams == d.test.meta.tx_beams &&
        d.train.meta.rx_beams == d.test.meta.rx_beams)) {
    throw IntegrityError("train and test datasets use different codebooks");
  }
  return d;
}

inline nn::ArchitectureSpec resolve_architecture(const ExperimentConfig& cfg,
                                                 std::size_t classes) {
  if (!cfg.architecture) {
    return nn::default_architecture(cfg.grid.cells_x, cfg.grid.cells_y, classes);
  }
  if (cfg.architecture->classes != classes) {
    throw ConfigError("architecture.classes",
                      "model has " + std::to_string(cfg.architecture->classes) +
                          " outputs but the dataset has " +
                          std::to_string(classes) + " beam pairs");
  }
  return *cfg.architecture;
}

// synth: generate the synthetic train/test sets and write them as
// <out>/train.fbds and <out>/test.fbds.
inline int cmd_synth(ExperimentConfig cfg, const Overrides& o, std::ostream& out,
                     std::ostream& err) {
  return guarded(
      [&] {
        apply(cfg, o);
        const auto* syn = std::get_if<SyntheticSource>(&cfg.dataset);
        if (!syn) throw ConfigError("dataset", "synth needs a synthetic source");
        require_output_dir(cfg.output_dir);
        const auto data = load_data(cfg, err);
        const std::filesystem::path dir(cfg.output_dir);
        save_dataset(data.train, (dir / "train.fbds").string());
        save_dataset(data.test, (dir / "test.fbds").string());
        out << "train: " << data.train.size() << " samples, label entropy "
            << label_entropy_bits(data.train) << " bits\n"
            << "test: " << data.test.size() << " samples, label entropy "
            << label_entropy_bits(data.test) << " bits\n";
        return int{kOk};
      },
      err);
}

inline MetricMap summary_metrics(const EvalReport& r, std::size_t k) {
  MetricMap m{{"top1_accuracy", r.accuracy_at(1)},
              {"top" + std::to_string(k) + "_accuracy", r.accuracy_at(k)}};
  if (auto t = r.throughput_at(k)) {
    m["top" + std::to_string(k) + "_throughput_ratio"] = *t;
  }
  return m;
}

// train: central or federated training, one or more seeded runs. Writes
// model.fbnn (run 0), report.json, sweep.csv and, in federated mode,
// rounds.csv (run 0).
inline int cmd_train(ExperimentConfig cfg, const Overrides& o, std::ostream& out,
                     std::ostream& err) {
  return guarded(
      [&] {
        apply(cfg, o);
        require_output_dir(cfg.output_dir);
        const auto data = load_data(cfg, err);
        if (data.train.empty() || data.test.empty()) {
          throw InvalidArgument("train: training and test sets must be non-empty");
        }
        const auto spec = resolve_architecture(cfg, data.train.meta.classes());
        if (cfg.k_max > spec.classes) {
          throw ConfigError("k_max", "exceeds the number of beam pairs (" +
                                         std::to_string(spec.classes) + ")");
        }
        const auto train = encode(data.train, cfg.grid);
        const auto test = encode(data.test, cfg.grid);
        const std::filesystem::path dir(cfg.output_dir);
        const std::size_t k_summary = std::min<std::size_t>(
            cfg.mode == TrainMode::kFederated ? cfg.federated.target_k : 10,
            cfg.k_max);

        nlohmann::json report;
        report["version"] = 1;
        report["mode"] = cfg.mode == TrainMode::kCentral ? "central" : "federated";
        report["seed"] = cfg.seed;
        report["n_runs"] = cfg.n_runs;
        report["architecture"] = nn::to_json(spec);
        report["reference"] = reference_json();

        std::optional<EvalReport> first;
        auto run_once = [&](std::uint64_t seed, std::size_t run) -> MetricMap {
          nn::ModelState model;
          nlohmann::json extra;
          if (cfg.mode == TrainMode::kCentral) {
            auto central = cfg.central;
            central.seed = seed;
            auto trained = train_centralized(central, spec, train);
            extra["epoch_loss"] = trained.epoch_loss;
            model = std::move(trained.model);
          } else {
            auto fed = cfg.federated;
            fed.partition_seed = fed.init_seed = fed.shuffle_seed = seed;
            auto result = run_federated(fed, train, test, spec);
            const auto reached =
                rounds_to_accuracy(result.logs, fed.target_accuracy);
            extra["rounds"] = result.logs.size();
            extra["rounds_to_target"] =
                reached ? nlohmann::json(*reached) : nlohmann::json("NA");
            if (reached) {
              const auto& at = result.logs[*reached - 1];
              extra["o_ul_at_target"] = at.o_ul;
              extra["o_dl_at_target"] = at.o_dl;
            }
            if (run == 0) {
              write_file((dir / "rounds.csv").string(), rounds_csv(result.logs));
            }
            model = std::move(result.model);
          }
          const auto eval = evaluate(model, test, cfg.k_max);
          if (run == 0) {
            first = eval;
            nn::save_checkpoint(model, (dir / "model.fbnn").string());
            report["training"] = extra;
          }
          auto metrics = summary_metrics(eval, k_summary);
          out << "run " << run << " (seed " << seed << "):";
          for (const auto& [name, value] : metrics) out << ' ' << name << '=' << value;
          out << '\n';
          return metrics;
        };

        if (cfg.n_runs >= 2) {
          std::size_t run = 0;
          const auto ci = monte_carlo(
              [&](std::uint64_t seed) { return run_once(seed, run++); },
              cfg.n_runs, cfg.seed);
          report["confidence_95"] = to_json(ci);
        } else {
          run_once(cfg.seed, 0);
        }
        report["evaluation"] = to_json(*first);
        write_file((dir / "report.json").string(), report.dump(2) + "\n");
        write_file((dir / "sweep.csv").string(), sweep_csv(*first));
        return int{kOk};
      },
      err);
}

// eval: inference with a stored checkpoint. Writes report.json and
// sweep.csv to the output directory.
inline int cmd_eval(const std::optional<ExperimentConfig>& maybe_cfg,
                    const std::string& checkpoint,
                    const std::optional<std::string>& dataset_path,
                    const Overrides& o, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        ExperimentConfig cfg = maybe_cfg.value_or(ExperimentConfig{});
        if (!maybe_cfg) cfg.dataset = FileSource{};
        apply(cfg, o);
        require_output_dir(cfg.output_dir);
        if (!std::filesystem::is_regular_file(checkpoint)) {
          throw ConfigError("--checkpoint", "file does not exist: " + checkpoint);
        }
        if (dataset_path && !std::filesystem::is_regular_file(*dataset_path)) {
          throw ConfigError("--dataset", "file does not exist: " + *dataset_path);
        }
        if (!dataset_path && !maybe_cfg) {
          throw ConfigError("--dataset", "required when no --config is given");
        }
        Dataset test = dataset_path ? load_dataset(*dataset_path)
                                    : load_data(cfg, err).test;
        const auto model =
            cfg.architecture
                ? nn::load_checkpoint(checkpoint,
                                      resolve_architecture(cfg, test.meta.classes()))
                : nn::load_checkpoint(checkpoint);
        if (model.spec.in_h != cfg.grid.cells_x ||
            model.spec.in_w != cfg.grid.cells_y ||
            model.spec.classes != test.meta.classes()) {
          throw IntegrityError(
              "checkpoint expects a " + std::to_string(model.spec.in_h) + "x" +
              std::to_string(model.spec.in_w) + " grid and " +
              std::to_string(model.spec.classes) + " beam pairs; data gives " +
              std::to_string(cfg.grid.cells_x) + "x" +
              std::to_string(cfg.grid.cells_y) + " and " +
              std::to_string(test.meta.classes()));
        }
        if (cfg.k_max > model.spec.classes) {
          throw ConfigError("k_max", "exceeds the number of beam pairs");
        }
        const auto report = evaluate(model, encode(test, cfg.grid), cfg.k_max);
        nlohmann::json j;
        j["version"] = 1;
        j["evaluation"] = to_json(report);
        const std::filesystem::path dir(cfg.output_dir);
        write_file((dir / "report.json").string(), j.dump(2) + "\n");
        write_file((dir / "sweep.csv").string(), sweep_csv(report));
        out << sweep_csv(report);
        return int{kOk};
      },
      err);
}

// flops: parameter and FLOP counts for an architecture JSON, an experiment
// config, or (with no input) the default architecture.
inline int cmd_flops(const std::optional<std::string>& path, std::ostream& out,
                     std::ostream& err) {
  return guarded(
      [&] {
        nn::ArchitectureSpec spec = nn::default_architecture(20, 200, 256);
        bool is_default = true;
        if (path) {
          if (!std::filesystem::is_regular_file(*path)) {
            throw ConfigError("--config", "file does not exist: " + *path);
          }
          nlohmann::json j;
          try {
            j = nlohmann::json::parse(read_file(*path));
          } catch (const nlohmann::json::exception& e) {
            throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
          }
          if (j.is_object() && j.contains("version")) {
            const auto cfg = parse_experiment(j, false);
            if (cfg.architecture) {
              spec = *cfg.architecture;
              is_default = false;
            } else {
              std::size_t classes = 256;
              if (const auto* syn = std::get_if<SyntheticSource>(&cfg.dataset)) {
                classes = std::size_t{syn->scene.tx_beams} * syn->scene.rx_beams;
              }
              spec = nn::default_architecture(cfg.grid.cells_x, cfg.grid.cells_y,
                                              classes);
            }
          } else {
            spec = nn::architecture_from_json(j, "architecture");
            is_default = false;
          }
        }
        nlohmann::json j = {{"architecture", nn::to_json(spec)},
                            {"default", is_default},
                            {"params", nn::count_params(spec)},
                            {"flops", nn::count_flops(spec)},
                            {"reference", reference_json()}};
        out << j.dump(2) << '\n';
        return int{kOk};
      },
      err);
}

}  // namespace fedbeam::cli
