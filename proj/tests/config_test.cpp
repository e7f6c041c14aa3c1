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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fedbeam/config.hpp"

namespace fedbeam {
namespace {

using nlohmann::json;

json minimal() {
  return {{"version", 1}, {"dataset", {{"synthetic", json::object()}}}};
}

std::string error_path(const json& j) {
  try {
    parse_experiment(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(Config, MinimalDocumentTakesDefaults) {
  const auto cfg = parse_experiment(minimal());
  ASSERT_TRUE(std::holds_alternative<SyntheticSource>(cfg.dataset));
  const auto& src = std::get<SyntheticSource>(cfg.dataset);
  EXPECT_EQ(src.train_samples, 2000u);
  EXPECT_FALSE(src.seed.has_value());
  EXPECT_EQ(cfg.mode, TrainMode::kCentral);
  EXPECT_FALSE(cfg.architecture.has_value());
  EXPECT_EQ(cfg.grid, GridConfig{});
  EXPECT_EQ(cfg.central.epochs, 20u);
  EXPECT_EQ(cfg.federated.vehicles, 5u);
  EXPECT_DOUBLE_EQ(cfg.federated.server_lr, 0.2);
  EXPECT_EQ(cfg.k_max, 10u);
}

TEST(Config, FullDocument) {
  auto j = minimal();
  j["mode"] = "federated";
  j["federated"] = {{"vehicles", 10}, {"local_epochs", 2}, {"server_lr", 0.5},
                    {"local_lr", 0.1}, {"decay", 0.0},      {"workers", 2},
                    {"stop_at_target", false}};
  j["central"] = {{"epochs", 3}, {"batch", 8}};
  j["grid"] = {{"cells_x", 10}, {"cells_y", 100}};
  j["architecture"] = nn::to_json(nn::default_architecture(10, 100, 64));
  j["k_max"] = 5;
  j["n_runs"] = 3;
  j["seed"] = 77;
  const auto cfg = parse_experiment(j);
  EXPECT_EQ(cfg.mode, TrainMode::kFederated);
  EXPECT_EQ(cfg.federated.vehicles, 10u);
  EXPECT_EQ(cfg.federated.local_epochs, 2u);
  EXPECT_DOUBLE_EQ(cfg.federated.schedule.initial, 0.1);
  EXPECT_DOUBLE_EQ(cfg.federated.schedule.decay, 0.0);
  EXPECT_FALSE(cfg.federated.stop_at_target);
  EXPECT_EQ(cfg.central.epochs, 3u);
  EXPECT_EQ(cfg.grid.cells_x, 10u);
  ASSERT_TRUE(cfg.architecture.has_value());
  EXPECT_EQ(cfg.n_runs, 3u);
  EXPECT_EQ(cfg.seed, 77u);
}

TEST(Config, SyntheticSceneRoundTrip) {
  SynthConfig scene;
  scene.obstacles = 2;
  scene.tx_beams = 8;
  auto j = minimal();
  j["dataset"]["synthetic"] = synth_config_to_json(scene);
  j["dataset"]["synthetic"]["seed"] = 4;
  const auto src = std::get<SyntheticSource>(parse_experiment(j).dataset);
  EXPECT_EQ(src.scene.obstacles, 2u);
  EXPECT_EQ(src.scene.tx_beams, 8u);
  EXPECT_EQ(src.seed, 4u);
  EXPECT_EQ(synth_config_to_json(src.scene), synth_config_to_json(scene));
}

TEST(Config, ErrorsNameTheField) {
  auto j = minimal();
  j["federated"] = {{"vehicles", -1}};
  EXPECT_EQ(error_path(j), "federated.vehicles");

  j = minimal();
  j["federated"] = {{"vehicels", 3}};
  EXPECT_EQ(error_path(j), "federated.vehicels");

  j = minimal();
  j["federated"] = {{"server_lr", "fast"}};
  EXPECT_EQ(error_path(j), "federated.server_lr");

  j = minimal();
  j["federated"] = {{"vehicles", 0}};
  EXPECT_EQ(error_path(j), "federated");

  j = minimal();
  j.erase("version");
  EXPECT_EQ(error_path(j), "version");

  j = minimal();
  j["version"] = 2;
  EXPECT_EQ(error_path(j), "version");

  j = minimal();
  j["dataset"]["files"] = {{"train", "a"}, {"test", "b"}};
  EXPECT_EQ(error_path(j), "dataset");

  j = minimal();
  j["dataset"] = {{"files", {{"train", "/no/such/file"}, {"test", "/no/such/file"}}}};
  EXPECT_EQ(error_path(j), "dataset.files.train");

  j = minimal();
  j["dataset"]["synthetic"]["area"] = {0, 0, 10};
  EXPECT_EQ(error_path(j), "dataset.synthetic.area");

  j = minimal();
  j["dataset"]["synthetic"]["tx_beams"] = 70000;
  EXPECT_EQ(error_path(j), "dataset.synthetic.tx_beams");

  j = minimal();
  j["grid"] = {{"cells_y", 150}};
  EXPECT_EQ(error_path(j), "grid");

  j = minimal();
  j["mode"] = "both";
  EXPECT_EQ(error_path(j), "mode");

  j = minimal();
  j["architecture"] = nn::to_json(nn::default_architecture(10, 100, 64));
  EXPECT_EQ(error_path(j), "architecture.input");

  j = minimal();
  auto arch = nn::to_json(nn::default_architecture(20, 200, 64));
  arch["conv"].erase(0);
  j["architecture"] = arch;
  EXPECT_EQ(error_path(j), "architecture");

  j = minimal();
  j["architecture"] = "tiny";
  EXPECT_EQ(error_path(j), "architecture");

  j = minimal();
  j["extra"] = true;
  EXPECT_EQ(error_path(j), "extra");

  j = minimal();
  j["k_max"] = 0;
  EXPECT_EQ(error_path(j), "k_max");
}

TEST(Config, PathChecksCanBeDeferred) {
  auto j = minimal();
  j["dataset"] = {{"files", {{"train", "/no/such/a"}, {"test", "/no/such/b"}}}};
  const auto cfg = parse_experiment(j, false);
  EXPECT_EQ(std::get<FileSource>(cfg.dataset).train, "/no/such/a");
}

TEST(Config, LoadFromFile) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = (dir / "fedbeam_cfg_good.json").string();
  const auto bad = (dir / "fedbeam_cfg_bad.json").string();
  std::ofstream(good) << minimal().dump();
  std::ofstream(bad) << "{\"version\": ";
  EXPECT_NO_THROW(load_experiment(good));
  EXPECT_THROW(load_experiment(bad), ConfigError);
  EXPECT_THROW(load_experiment((dir / "fedbeam_missing.json").string()), ConfigError);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

}  // namespace
}  // namespace fedbeam
