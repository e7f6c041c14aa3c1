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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fedbeam/fedavg.hpp"
#include "test_support.hpp"

namespace fedbeam {
namespace {

using testing::small_encoded;
using testing::small_spec;

TEST(Aggregate, MeanOfDeltasScaledByServerRate) {
  const std::vector<float> theta{0.0F, 1.0F};
  const std::vector<std::vector<double>> deltas{{1.0, -1.0}, {2.0, 3.0}};
  const auto full = aggregate(theta, deltas, 1.0);
  EXPECT_FLOAT_EQ(full[0], 1.5F);
  EXPECT_FLOAT_EQ(full[1], 2.0F);
  const auto damped = aggregate(theta, deltas, 0.2);
  EXPECT_FLOAT_EQ(damped[0], 0.3F);
  EXPECT_FLOAT_EQ(damped[1], 1.2F);
}

TEST(Aggregate, OrderOfVehiclesOnlyAffectsRounding) {
  const std::vector<float> theta{0.5F, -0.25F, 3.0F};
  std::vector<std::vector<double>> deltas{{0.1, 0.2, 0.3}, {1e-3, -5.0, 2.0}, {7.0, 0.0, -1.0}};
  const auto a = aggregate(theta, deltas, 0.2);
  std::swap(deltas[0], deltas[2]);
  const auto b = aggregate(theta, deltas, 0.2);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-6);
}

TEST(Aggregate, Errors) {
  const std::vector<float> theta{0.0F, 1.0F};
  EXPECT_THROW(aggregate(theta, std::vector<std::vector<double>>{}, 0.2), InvalidArgument);
  EXPECT_THROW(aggregate(theta, std::vector<std::vector<double>>{{1.0}}, 0.2),
               InvalidArgument);
}

TEST(BatchNormAveraging, UnweightedMean) {
  std::vector<ClientState> clients(2);
  clients[0].local.bn = {{1.0F, 2.0F}, {1.0F, 4.0F}};
  clients[1].local.bn = {{3.0F, 0.0F}, {3.0F, 2.0F}};
  const auto bn = average_batch_norm(clients);
  EXPECT_EQ(bn.mean, (std::vector<float>{2.0F, 1.0F}));
  EXPECT_EQ(bn.var, (std::vector<float>{2.0F, 3.0F}));
}

TEST(Overhead, Bookkeeping) {
  const std::uint64_t p = 7738;
  for (auto [v, n] : {std::pair<std::uint64_t, std::uint64_t>{5, 19}, {10, 31}, {20, 81}}) {
    const auto o = communication_overhead(v, n, p);
    EXPECT_EQ(o.uplink, v * n * p);
    EXPECT_EQ(o.downlink, n * p);
  }
  EXPECT_EQ(communication_overhead(5, 19, 7462).uplink, 708890u);
  EXPECT_EQ(communication_overhead(5, 19, 7462).downlink, 141778u);
}

TEST(RoundsToAccuracy, FirstStrictCrossing) {
  std::vector<RoundLog> logs(3);
  const double acc[3] = {0.5, 0.89, 0.91};
  for (std::size_t r = 0; r < 3; ++r) {
    logs[r].round = r + 1;
    logs[r].topk = acc[r];
  }
  EXPECT_EQ(rounds_to_accuracy(logs, 0.88), 2u);
  EXPECT_EQ(rounds_to_accuracy(logs, 0.89), 3u);
  EXPECT_FALSE(rounds_to_accuracy(logs, 0.95).has_value());
}

class FederatedTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    train_ = new EncodedSet(small_encoded(96, 1));
    test_ = new EncodedSet(small_encoded(32, 2));
  }
  static void TearDownTestSuite() {
    delete train_;
    delete test_;
  }
  static FedConfig base() {
    FedConfig cfg;
    cfg.vehicles = 3;
    cfg.max_rounds = 3;
    cfg.batch = 8;
    cfg.stop_at_target = false;
    return cfg;
  }
  static EncodedSet* train_;
  static EncodedSet* test_;
};
EncodedSet* FederatedTest::train_ = nullptr;
EncodedSet* FederatedTest::test_ = nullptr;

TEST_F(FederatedTest, SingleVehicleEqualsCentralSgd) {
  FedConfig cfg = base();
  cfg.vehicles = 1;
  cfg.server_lr = 1.0;
  cfg.max_rounds = 4;
  const auto spec = small_spec();
  const auto init = nn::init_params(spec, 3);
  const auto central =
      train_sgd(init, *train_, 4, cfg.batch, cfg.schedule, client_stream_seed(cfg.shuffle_seed, 0));
  std::vector<nn::ModelState> rounds;
  run_federated(cfg, *train_, *test_, spec, partition_uniform(train_->size(), 1, 1), init,
                [&rounds](const RoundLog&, const nn::ModelState& m) {
                  rounds.push_back(m);
                  return true;
                });
  ASSERT_EQ(rounds.size(), 4u);
  for (std::size_t r = 0; r < 4; ++r) {
    double worst = 0.0;
    for (std::size_t k = 0; k < init.params.size(); ++k) {
      worst = std::max(worst, static_cast<double>(
                                  std::abs(rounds[r].params[k] - central[r].params[k])));
    }
    EXPECT_LE(worst, 1e-6) << "round " << r + 1;
    for (std::size_t k = 0; k < init.bn.mean.size(); ++k) {
      EXPECT_NEAR(rounds[r].bn.mean[k], central[r].bn.mean[k], 1e-6);
      EXPECT_NEAR(rounds[r].bn.var[k], central[r].bn.var[k], 1e-6);
    }
  }
}

TEST_F(FederatedTest, ThreadCountDoesNotChangeResult) {
  FedConfig cfg = base();
  const auto spec = small_spec();
  const auto serial = run_federated(cfg, *train_, *test_, spec);
  cfg.workers = 3;
  const auto threaded = run_federated(cfg, *train_, *test_, spec);
  EXPECT_EQ(serial.model, threaded.model);
}

TEST_F(FederatedTest, LogsCarryCumulativeOverhead) {
  FedConfig cfg = base();
  const auto spec = small_spec();
  const auto res = run_federated(cfg, *train_, *test_, spec);
  ASSERT_EQ(res.logs.size(), 3u);
  const auto p = nn::count_params(spec);
  for (const auto& log : res.logs) {
    EXPECT_EQ(log.o_ul, 3 * log.round * p);
    EXPECT_EQ(log.o_dl, log.round * p);
    EXPECT_GE(log.topk, log.top1);
    ASSERT_TRUE(log.throughput_ratio.has_value());
  }
}

TEST_F(FederatedTest, StopsAtTargetAndOnCallback) {
  FedConfig cfg = base();
  cfg.stop_at_target = true;
  cfg.target_accuracy = -1.0;
  EXPECT_EQ(run_federated(cfg, *train_, *test_, small_spec()).logs.size(), 1u);
  cfg.stop_at_target = false;
  const auto res = run_federated(cfg, *train_, *test_, small_spec(),
                                 partition_uniform(train_->size(), 3, 1), std::nullopt,
                                 [](const RoundLog& l, const nn::ModelState&) {
                                   return l.round < 2;
                                 });
  EXPECT_EQ(res.logs.size(), 2u);
}

TEST_F(FederatedTest, NonFiniteModelIsNumericError) {
  FedConfig cfg = base();
  auto init = nn::init_params(small_spec(), 1);
  init.params.back() = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(run_federated(cfg, *train_, *test_, small_spec(),
                             partition_uniform(train_->size(), 3, 1), init),
               NumericError);
}

TEST_F(FederatedTest, ConfigAndPartitionChecks) {
  FedConfig cfg = base();
  EXPECT_THROW(run_federated(cfg, *train_, *test_, small_spec(),
                             partition_uniform(train_->size(), 2, 1)),
               InvalidArgument);
  cfg.server_lr = 0.0;
  EXPECT_THROW(run_federated(cfg, *train_, *test_, small_spec()), InvalidArgument);
  cfg = base();
  cfg.vehicles = 200;
  EXPECT_THROW(run_federated(cfg, *train_, *test_, small_spec()), InvalidArgument);
}

}  // namespace
}  // namespace fedbeam
