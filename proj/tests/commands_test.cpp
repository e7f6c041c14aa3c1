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
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fedbeam/commands.hpp"

namespace fedbeam::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fedbeam_cmd_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json doc(std::size_t train = 48, std::size_t test = 16) const {
    return {{"version", 1},
            {"dataset",
             {{"synthetic",
               {{"train_samples", train},
                {"test_samples", test},
                {"obstacles", 3},
                {"tx_beams", 4},
                {"rx_beams", 2},
                {"tx_antennas", 4},
                {"rx_antennas", 2},
                {"subcarriers", 2}}}}},
            {"grid", {{"cells_x", 10}, {"cells_y", 100}}},
            {"central", {{"epochs", 1}, {"batch", 8}}},
            {"federated",
             {{"vehicles", 2}, {"max_rounds", 2}, {"batch", 8}, {"stop_at_target", false}}},
            {"k_max", 4},
            {"output_dir", dir_.string()},
            {"seed", 3}};
  }

  Overrides none() const { return {}; }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CommandsTest, SynthWritesLoadableFiles) {
  ASSERT_EQ(cmd_synth(parse_experiment(doc()), none(), out_, err_), kOk) << err_.str();
  const auto train = load_dataset((dir_ / "train.fbds").string());
  const auto test = load_dataset((dir_ / "test.fbds").string());
  EXPECT_EQ(train.size(), 48u);
  EXPECT_EQ(test.size(), 16u);
  EXPECT_NE(train.samples[0], test.samples[0]);
  EXPECT_NE(out_.str().find("label entropy"), std::string::npos);
}

TEST_F(CommandsTest, SynthIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(cmd_synth(parse_experiment(doc()), none(), out_, err_), kOk);
  const auto first = read_file((dir_ / "train.fbds").string());
  ASSERT_EQ(cmd_synth(parse_experiment(doc()), none(), out_, err_), kOk);
  EXPECT_EQ(read_file((dir_ / "train.fbds").string()), first);
  Overrides o;
  o.seed = 4;
  ASSERT_EQ(cmd_synth(parse_experiment(doc()), o, out_, err_), kOk);
  EXPECT_NE(read_file((dir_ / "train.fbds").string()), first);
}

TEST_F(CommandsTest, SynthOfZeroSamplesIsAValidEmptyFile) {
  ASSERT_EQ(cmd_synth(parse_experiment(doc(0, 0)), none(), out_, err_), kOk);
  EXPECT_TRUE(load_dataset((dir_ / "train.fbds").string()).empty());
}

TEST_F(CommandsTest, MissingOutputDirectoryIsConfigError) {
  Overrides o;
  o.out = (dir_ / "absent").string();
  EXPECT_EQ(cmd_synth(parse_experiment(doc()), o, out_, err_), kConfigError);
  EXPECT_EQ(cmd_train(parse_experiment(doc()), o, out_, err_), kConfigError);
  EXPECT_NE(err_.str().find("output_dir"), std::string::npos);
}

TEST_F(CommandsTest, TrainThenEvalReproducesTheReport) {
  ASSERT_EQ(cmd_train(parse_experiment(doc()), none(), out_, err_), kOk) << err_.str();
  const auto report = json::parse(read_file((dir_ / "report.json").string()));
  const auto sweep = read_file((dir_ / "sweep.csv").string());
  EXPECT_EQ(report["mode"], "central");
  EXPECT_EQ(report["evaluation"]["accuracy"].size(), 4u);
  EXPECT_EQ(report["training"]["epoch_loss"].size(), 1u);

  fs::create_directories(dir_ / "eval");
  Overrides o;
  o.out = (dir_ / "eval").string();
  ASSERT_EQ(cmd_eval(parse_experiment(doc()), (dir_ / "model.fbnn").string(), std::nullopt, o,
                     out_, err_),
            kOk)
      << err_.str();
  const auto again = json::parse(read_file((dir_ / "eval" / "report.json").string()));
  EXPECT_EQ(again["evaluation"], report["evaluation"]);
  EXPECT_EQ(read_file((dir_ / "eval" / "sweep.csv").string()), sweep);
}

TEST_F(CommandsTest, EvalWithoutPowersReportsNa) {
  ASSERT_EQ(cmd_train(parse_experiment(doc()), none(), out_, err_), kOk) << err_.str();
  auto test = generate_synthetic(std::get<SyntheticSource>(parse_experiment(doc()).dataset).scene,
                                 8, 99);
  for (auto& s : test.samples) s.powers.reset();
  const auto path = (dir_ / "nopowers.fbds").string();
  save_dataset(test, path);
  ASSERT_EQ(cmd_eval(parse_experiment(doc()), (dir_ / "model.fbnn").string(), path, none(),
                     out_, err_),
            kOk)
      << err_.str();
  const auto sweep = read_file((dir_ / "sweep.csv").string());
  EXPECT_NE(sweep.find(",NA\n"), std::string::npos);
  EXPECT_TRUE(json::parse(read_file((dir_ / "report.json").string()))["evaluation"]
                  ["throughput_ratio"]
                      .is_null());
}

TEST_F(CommandsTest, EvalRejectsIncompatibleData) {
  ASSERT_EQ(cmd_train(parse_experiment(doc()), none(), out_, err_), kOk) << err_.str();
  SynthConfig other;  // 64 beam pairs
  const auto path = (dir_ / "other.fbds").string();
  save_dataset(generate_synthetic(other, 4, 1), path);
  Overrides o;
  o.out = dir_.string();
  EXPECT_EQ(cmd_eval(std::nullopt, (dir_ / "model.fbnn").string(), path, o, out_, err_),
            kDataError);
  EXPECT_EQ(cmd_eval(std::nullopt, (dir_ / "missing.fbnn").string(), path, o, out_, err_),
            kConfigError);
  EXPECT_EQ(cmd_eval(std::nullopt, (dir_ / "model.fbnn").string(), std::nullopt, o, out_, err_),
            kConfigError);
  EXPECT_EQ(cmd_eval(std::nullopt, (dir_ / "model.fbnn").string(), path, none(), out_, err_),
            kConfigError);
}

TEST_F(CommandsTest, FederatedWritesRoundsAndIntervals) {
  auto j = doc();
  j["mode"] = "federated";
  j["n_runs"] = 2;
  ASSERT_EQ(cmd_train(parse_experiment(j), none(), out_, err_), kOk) << err_.str();
  const auto rounds = read_file((dir_ / "rounds.csv").string());
  EXPECT_EQ(rounds.rfind(rounds_csv_header(), 0), 0u);
  EXPECT_EQ(std::count(rounds.begin(), rounds.end(), '\n'), 3);
  const auto report = json::parse(read_file((dir_ / "report.json").string()));
  EXPECT_EQ(report["mode"], "federated");
  EXPECT_EQ(report["training"]["rounds"], 2);
  ASSERT_TRUE(report.contains("confidence_95"));
  EXPECT_EQ(report["confidence_95"]["top1_accuracy"]["values"].size(), 2u);
}

TEST_F(CommandsTest, KMaxBeyondClassesIsConfigError) {
  Overrides o;
  o.k_max = 9;
  EXPECT_EQ(cmd_train(parse_experiment(doc()), o, out_, err_), kConfigError);
}

TEST_F(CommandsTest, FlopsForDefaultAndConfig) {
  ASSERT_EQ(cmd_flops(std::nullopt, out_, err_), kOk);
  auto j = json::parse(out_.str());
  EXPECT_EQ(j["params"], 7738);
  EXPECT_EQ(j["reference"]["proposed_2d"]["params"], 7462);

  const auto path = (dir_ / "exp.json").string();
  write_file(path, doc().dump());
  std::ostringstream o2;
  ASSERT_EQ(cmd_flops(path, o2, err_), kOk);
  EXPECT_EQ(json::parse(o2.str())["params"],
            nn::count_params(nn::default_architecture(10, 100, 8)));

  write_file(path, "{ nope");
  EXPECT_EQ(cmd_flops(path, o2, err_), kConfigError);
}

TEST(Guarded, MapsErrorsToExitCodes) {
  std::ostringstream err;
  EXPECT_EQ(guarded([]() -> int { throw ConfigError("a", "b"); }, err), kConfigError);
  EXPECT_EQ(guarded([]() -> int { throw NumericError("nan"); }, err), kNumericError);
  EXPECT_EQ(guarded([]() -> int { throw IntegrityError("bad"); }, err), kDataError);
  EXPECT_EQ(guarded([]() -> int { throw InvalidArgument("bad"); }, err), kDataError);
  EXPECT_EQ(guarded([] { return int{kOk}; }, err), kOk);
}

}  // namespace
}  // namespace fedbeam::cli
