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

#include <algorithm>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fedbeam/encoded.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/nn/network.hpp"
#include "fedbeam/nn/optim.hpp"
#include "fedbeam/random.hpp"

namespace fedbeam {

// Splits an epoch ordering into consecutive mini-batches. The last short
// batch is kept; a trailing singleton is folded into the previous batch.
inline std::vector<std::span<const std::size_t>> make_batches(
    std::span<const std::size_t> order, std::size_t batch) {
  if (batch < 2) throw InvalidArgument("batch size must be >= 2");
  if (order.size() < 2) {
    throw InvalidArgument("need at least 2 samples to form a training batch");
  }
  std::vector<std::span<const std::size_t>> out;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t len = std::min(batch, order.size() - start);
    if (order.size() - start - len == 1) ++len;
    out.push_back(order.subspan(start, len));
    start += len;
  }
  return out;
}

// Local step size rho_t = rho_0 * exp(-decay * t), t = steps taken so far.
struct LocalSchedule {
  double initial = 0.2;
  double decay = 0.001;

  double rate(std::uint64_t step) const {
    return initial * std::exp(-decay * static_cast<double>(step));
  }
};

// One epoch of mini-batch SGD over 'indices' (shuffled from rng). Advances
// 'step' once per batch. Returns the mean batch loss.
inline double sgd_epoch(const nn::Network<float>& net, nn::ModelState& model,
                        const EncodedSet& data,
                        std::span<const std::size_t> indices, std::size_t batch,
                        const LocalSchedule& schedule, std::uint64_t& step,
                        std::mt19937_64& rng) {
  std::vector<std::size_t> order(indices.begin(), indices.end());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<float> grad(net.param_count());
  std::vector<float> inputs;
  std::vector<BeamLabel> labels;
  double total = 0.0;
  const auto batches = make_batches(order, batch);
  for (std::size_t b = 0; b < batches.size(); ++b) {
    data.gather(batches[b], inputs, labels);
    const float loss =
        net.loss_and_grad(model.params, model.bn, inputs, labels, grad);
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite loss at step " + std::to_string(step) +
                         " (batch " + std::to_string(b) + ")");
    }
    nn::sgd_step<float>(model.params, grad, schedule.rate(step));
    ++step;
    total += loss;
  }
  return total / static_cast<double>(batches.size());
}

// Adam, per-epoch reshuffle, learning rate multiplied by drop_factor once
// drop_after_epoch epochs have completed.
struct CentralTrainConfig {
  std::size_t epochs = 20;
  std::size_t batch = 16;
  double learning_rate = 1e-3;
  double drop_factor = 0.1;
  std::size_t drop_after_epoch = 10;
  std::uint64_t seed = 1;

  void validate() const {
    if (epochs < 1) throw InvalidArgument("central: epochs must be >= 1");
    if (batch < 2) throw InvalidArgument("central: batch must be >= 2");
    if (!(learning_rate > 0.0)) {
      throw InvalidArgument("central: learning rate must be > 0");
    }
    if (!(drop_factor > 0.0)) {
      throw InvalidArgument("central: drop factor must be > 0");
    }
  }
};

struct TrainResult {
  nn::ModelState model;
  std::vector<double> epoch_loss;
};

inline TrainResult train_centralized(const CentralTrainConfig& cfg,
                                     const nn::ArchitectureSpec& spec,
                                     const EncodedSet& train) {
  cfg.validate();
  if (train.size() == 0) {
    throw InvalidArgument("train_centralized: empty training set");
  }
  nn::Network<float> net(spec);
  TrainResult result{nn::init_params(spec, cfg.seed), {}};
  auto& model = result.model;
  nn::AdamState<float> adam(net.param_count());
  std::mt19937_64 rng(derive_seed(cfg.seed, streams::kShuffle));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<float> grad(net.param_count());
  std::vector<float> inputs;
  std::vector<BeamLabel> labels;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = epoch >= cfg.drop_after_epoch
                          ? cfg.learning_rate * cfg.drop_factor
                          : cfg.learning_rate;
    std::shuffle(order.begin(), order.end(), rng);
    const auto batches = make_batches(order, cfg.batch);
    double total = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      train.gather(batches[b], inputs, labels);
      const float loss =
          net.loss_and_grad(model.params, model.bn, inputs, labels, grad);
      if (!std::isfinite(loss)) {
        throw NumericError("training diverged at epoch " +
                           std::to_string(epoch + 1) + ", batch " +
                           std::to_string(b));
      }
      nn::adam_step<float>(adam, model.params, grad, lr);
      total += loss;
    }
    result.epoch_loss.push_back(total / static_cast<double>(batches.size()));
  }
  return result;
}

// Plain mini-batch SGD over the whole set with the federated local
// schedule; the centralized counterpart of a single-vehicle federation.
// Returns the model after each epoch.
inline std::vector<nn::ModelState> train_sgd(const nn::ModelState& init,
                                             const EncodedSet& train,
                                             std::size_t epochs,
                                             std::size_t batch,
                                             const LocalSchedule& schedule,
                                             std::uint64_t shuffle_seed) {
  nn::Network<float> net(init.spec);
  nn::ModelState model = init;
  std::vector<std::size_t> indices(train.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  std::mt19937_64 rng(shuffle_seed);
  std::uint64_t step = 0;
  std::vector<nn::ModelState> trajectory;
  for (std::size_t e = 0; e < epochs; ++e) {
    sgd_epoch(net, model, train, indices, batch, schedule, step, rng);
    trajectory.push_back(model);
  }
  return trajectory;
}

}  // namespace fedbeam
