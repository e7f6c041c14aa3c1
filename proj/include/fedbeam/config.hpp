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

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedbeam/binary_io.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/fedavg.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/preprocess.hpp"
#include "fedbeam/synthetic.hpp"
#include "fedbeam/training.hpp"

namespace fedbeam {

struct SyntheticSource {
  SynthConfig scene;
  std::size_t train_samples = 2000;
  std::size_t test_samples = 500;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
};

struct FileSource {
  std::string train;
  std::string test;
};

struct IngestSource {
  std::string spec;
  std::string train_dir;
  std::string test_dir;
};

enum class TrainMode { kCentral, kFederated };

struct ExperimentConfig {
  int version = 1;
  std::variant<SyntheticSource, FileSource, IngestSource> dataset;
  GridConfig grid;
  std::optional<nn::ArchitectureSpec> architecture;  // nullopt: default
  TrainMode mode = TrainMode::kCentral;
  CentralTrainConfig central;
  FedConfig federated;
  std::size_t k_max = 10;
  std::size_t n_runs = 1;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
};

namespace detail {

// Typed access to one JSON object with dotted error paths and a check for
// unrecognized keys.
class FieldReader {
 public:
  FieldReader(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where(), "expected an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string child(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const nlohmann::json& at(const char* key) {
    if (!has(key)) throw ConfigError(child(key), "missing");
    return j_.at(key);
  }

  template <typename T>
  T get(const char* key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), child(key));
  }

  template <typename T>
  T require(const char* key) {
    return convert<T>(at(key), child(key));
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(child(key.c_str()), "unknown field");
    }
  }

  template <typename T>
  static T convert(const nlohmann::json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned() && v.get<long long>() < 0) {
          throw ConfigError(path, "must be non-negative");
        }
        const auto u = v.get<std::uint64_t>();
        if (u > std::numeric_limits<T>::max()) {
          throw ConfigError(path, "value out of range");
        }
        return static_cast<T>(u);
      } else {
        const auto i = v.get<long long>();
        if (i < std::numeric_limits<T>::min() || i > std::numeric_limits<T>::max()) {
          throw ConfigError(path, "value out of range");
        }
        return static_cast<T>(i);
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string");
      return v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::vector<double> number_list(const nlohmann::json& v,
                                       const std::string& path,
                                       std::size_t n) {
  if (!v.is_array() || v.size() != n) {
    throw ConfigError(path, "expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& x : v) out.push_back(FieldReader::convert<double>(x, path));
  return out;
}

inline SynthConfig parse_synth(FieldReader& r) {
  SynthConfig c;
  if (r.has("area")) {
    const auto a = number_list(r.at("area"), r.child("area"), 4);
    c.area = {static_cast<float>(a[0]), static_cast<float>(a[1]),
              static_cast<float>(a[2]), static_cast<float>(a[3])};
  }
  if (r.has("bs_pos")) {
    const auto b = number_list(r.at("bs_pos"), r.child("bs_pos"), 3);
    c.bs_pos = {static_cast<float>(b[0]), static_cast<float>(b[1]),
                static_cast<float>(b[2])};
  }
  c.vehicle_height = r.get<float>("vehicle_height", c.vehicle_height);
  c.obstacles = r.get<std::size_t>("obstacles", c.obstacles);
  c.obstacle_width_min = r.get<double>("obstacle_width_min", c.obstacle_width_min);
  c.obstacle_width_max = r.get<double>("obstacle_width_max", c.obstacle_width_max);
  c.obstacle_length_min = r.get<double>("obstacle_length_min", c.obstacle_length_min);
  c.obstacle_length_max = r.get<double>("obstacle_length_max", c.obstacle_length_max);
  c.obstacle_height_min = r.get<double>("obstacle_height_min", c.obstacle_height_min);
  c.obstacle_height_max = r.get<double>("obstacle_height_max", c.obstacle_height_max);
  c.tx_beams = r.get<std::uint16_t>("tx_beams", c.tx_beams);
  c.rx_beams = r.get<std::uint16_t>("rx_beams", c.rx_beams);
  c.tx_antennas = r.get<std::uint16_t>("tx_antennas", c.tx_antennas);
  c.rx_antennas = r.get<std::uint16_t>("rx_antennas", c.rx_antennas);
  c.subcarriers = r.get<std::uint16_t>("subcarriers", c.subcarriers);
  c.subcarrier_spacing_hz = r.get<double>("subcarrier_spacing_hz", c.subcarrier_spacing_hz);
  c.los_gain = r.get<double>("los_gain", c.los_gain);
  c.reflection_gain = r.get<double>("reflection_gain", c.reflection_gain);
  c.reflection_ref_length_m =
      r.get<double>("reflection_ref_length_m", c.reflection_ref_length_m);
  c.point_spacing_m = r.get<double>("point_spacing_m", c.point_spacing_m);
  c.max_retries = r.get<std::size_t>("max_retries", c.max_retries);
  return c;
}

inline void require_path(const std::string& p, const std::string& field,
                         bool directory) {
  namespace fs = std::filesystem;
  const bool ok = directory ? fs::is_directory(p) : fs::is_regular_file(p);
  if (!ok) throw ConfigError(field, "path does not exist: " + p);
}

}  // namespace detail

inline nlohmann::json synth_config_to_json(const SynthConfig& c) {
  return {{"area", {c.area.x_min, c.area.y_min, c.area.x_max, c.area.y_max}},
          {"bs_pos", {c.bs_pos.x, c.bs_pos.y, c.bs_pos.z}},
          {"vehicle_height", c.vehicle_height},
          {"obstacles", c.obstacles},
          {"obstacle_width_min", c.obstacle_width_min},
          {"obstacle_width_max", c.obstacle_width_max},
          {"obstacle_length_min", c.obstacle_length_min},
          {"obstacle_length_max", c.obstacle_length_max},
          {"obstacle_height_min", c.obstacle_height_min},
          {"obstacle_height_max", c.obstacle_height_max},
          {"tx_beams", c.tx_beams},
          {"rx_beams", c.rx_beams},
          {"tx_antennas", c.tx_antennas},
          {"rx_antennas", c.rx_antennas},
          {"subcarriers", c.subcarriers},
          {"subcarrier_spacing_hz", c.subcarrier_spacing_hz},
          {"los_gain", c.los_gain},
          {"reflection_gain", c.reflection_gain},
          {"reflection_ref_length_m", c.reflection_ref_length_m},
          {"point_spacing_m", c.point_spacing_m},
          {"max_retries", c.max_retries}};
}

inline GridConfig parse_grid(const nlohmann::json& j, const std::string& path = "grid") {
  detail::FieldReader r(j, path);
  GridConfig g;
  g.x_min = r.get<double>("x_min", g.x_min);
  g.x_max = r.get<double>("x_max", g.x_max);
  g.y_min = r.get<double>("y_min", g.y_min);
  g.y_max = r.get<double>("y_max", g.y_max);
  g.cells_x = r.get<std::size_t>("cells_x", g.cells_x);
  g.cells_y = r.get<std::size_t>("cells_y", g.cells_y);
  r.reject_unknown();
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  return g;
}

// Parses and validates an experiment document. With check_paths, every
// referenced input path must exist now.
inline ExperimentConfig parse_experiment(const nlohmann::json& j,
                                         bool check_paths = true) {
  detail::FieldReader root(j, "");
  ExperimentConfig cfg;
  cfg.version = root.require<int>("version");
  if (cfg.version != 1) throw ConfigError("version", "unsupported version");

  {
    const auto& dj = root.at("dataset");
    detail::FieldReader d(dj, "dataset");
    const int sources = int(d.has("synthetic")) + int(d.has("files")) +
                        int(d.has("ingest"));
    if (sources != 1) {
      throw ConfigError("dataset",
                        "exactly one of synthetic, files, ingest is required");
    }
    if (d.has("synthetic")) {
      detail::FieldReader s(d.at("synthetic"), "dataset.synthetic");
      SyntheticSource src;
      src.train_samples = s.get<std::size_t>("train_samples", src.train_samples);
      src.test_samples = s.get<std::size_t>("test_samples", src.test_samples);
      if (s.has("seed")) src.seed = s.require<std::uint64_t>("seed");
      src.scene = detail::parse_synth(s);
      s.reject_unknown();
      try {
        src.scene.validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError("dataset.synthetic", e.what());
      }
      cfg.dataset = src;
    } else if (d.has("files")) {
      detail::FieldReader f(d.at("files"), "dataset.files");
      FileSource src{f.require<std::string>("train"), f.require<std::string>("test")};
      f.reject_unknown();
      if (check_paths) {
        detail::require_path(src.train, "dataset.files.train", false);
        detail::require_path(src.test, "dataset.files.test", false);
      }
      cfg.dataset = src;
    } else {
      detail::FieldReader f(d.at("ingest"), "dataset.ingest");
      IngestSource src{f.require<std::string>("spec"),
                       f.require<std::string>("train_dir"),
                       f.require<std::string>("test_dir")};
      f.reject_unknown();
      if (check_paths) {
        detail::require_path(src.spec, "dataset.ingest.spec", false);
        detail::require_path(src.train_dir, "dataset.ingest.train_dir", true);
        detail::require_path(src.test_dir, "dataset.ingest.test_dir", true);
      }
      cfg.dataset = src;
    }
    d.reject_unknown();
  }

  if (root.has("grid")) cfg.grid = parse_grid(root.at("grid"));

  if (root.has("architecture")) {
    const auto& a = root.at("architecture");
    if (a.is_string()) {
      if (a.get<std::string>() != "default") {
        throw ConfigError("architecture", "expected \"default\" or an object");
      }
    } else {
      cfg.architecture = nn::architecture_from_json(a, "architecture");
      try {
        nn::validate_full_topology(*cfg.architecture);
      } catch (const InvalidArgument& e) {
        throw ConfigError("architecture", e.what());
      }
      if (cfg.architecture->in_ch != 1 ||
          cfg.architecture->in_h != cfg.grid.cells_x ||
          cfg.architecture->in_w != cfg.grid.cells_y) {
        throw ConfigError("architecture.input",
                          "must be 1 x grid.cells_x x grid.cells_y");
      }
    }
  }

  const auto mode = root.get<std::string>("mode", "central");
  if (mode == "central") {
    cfg.mode = TrainMode::kCentral;
  } else if (mode == "federated") {
    cfg.mode = TrainMode::kFederated;
  } else {
    throw ConfigError("mode", "expected \"central\" or \"federated\"");
  }

  if (root.has("central")) {
    detail::FieldReader c(root.at("central"), "central");
    auto& t = cfg.central;
    t.epochs = c.get<std::size_t>("epochs", t.epochs);
    t.batch = c.get<std::size_t>("batch", t.batch);
    t.learning_rate = c.get<double>("learning_rate", t.learning_rate);
    t.drop_factor = c.get<double>("drop_factor", t.drop_factor);
    t.drop_after_epoch = c.get<std::size_t>("drop_after_epoch", t.drop_after_epoch);
    c.reject_unknown();
    try {
      t.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("central", e.what());
    }
  }

  if (root.has("federated")) {
    detail::FieldReader f(root.at("federated"), "federated");
    auto& t = cfg.federated;
    t.vehicles = f.get<std::size_t>("vehicles", t.vehicles);
    t.local_epochs = f.get<std::size_t>("local_epochs", t.local_epochs);
    t.max_rounds = f.get<std::size_t>("max_rounds", t.max_rounds);
    t.server_lr = f.get<double>("server_lr", t.server_lr);
    t.schedule.initial = f.get<double>("local_lr", t.schedule.initial);
    t.schedule.decay = f.get<double>("decay", t.schedule.decay);
    t.batch = f.get<std::size_t>("batch", t.batch);
    t.target_accuracy = f.get<double>("target_accuracy", t.target_accuracy);
    t.target_k = f.get<std::size_t>("target_k", t.target_k);
    t.stop_at_target = f.get<bool>("stop_at_target", t.stop_at_target);
    t.reset_schedule_each_round =
        f.get<bool>("reset_schedule_each_round", t.reset_schedule_each_round);
    t.workers = f.get<std::size_t>("workers", t.workers);
    f.reject_unknown();
    try {
      t.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("federated", e.what());
    }
  }

  cfg.k_max = root.get<std::size_t>("k_max", cfg.k_max);
  if (cfg.k_max < 1) throw ConfigError("k_max", "must be >= 1");
  cfg.n_runs = root.get<std::size_t>("n_runs", cfg.n_runs);
  if (cfg.n_runs < 1) throw ConfigError("n_runs", "must be >= 1");
  cfg.output_dir = root.get<std::string>("output_dir", cfg.output_dir);
  cfg.seed = root.get<std::uint64_t>("seed", cfg.seed);
  root.reject_unknown();
  return cfg;
}

inline ExperimentConfig load_experiment(const std::string& path,
                                        bool check_paths = true) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("--config", "file does not exist: " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment(j, check_paths);
}

}  // namespace fedbeam
