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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fedbeam/dataset.hpp"
#include "fedbeam/encoded.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/evaluate.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/nn/network.hpp"
#include "fedbeam/random.hpp"
#include "fedbeam/training.hpp"

namespace fedbeam {

struct FedConfig {
  std::size_t vehicles = 5;         // V
  std::size_t local_epochs = 1;     // N_v
  std::size_t max_rounds = 100;     // N_a cap
  double server_lr = 0.2;           // mu
  LocalSchedule schedule{0.2, 0.001};
  std::size_t batch = 16;
  std::uint64_t partition_seed = 1;
  std::uint64_t init_seed = 1;
  std::uint64_t shuffle_seed = 1;
  double target_accuracy = 0.88;
  std::size_t target_k = 10;
  bool stop_at_target = true;
  // Restart each client's step counter (and so rho_t) every round.
  bool reset_schedule_each_round = false;
  std::size_t workers = 1;

  void validate() const {
    if (vehicles < 1) throw InvalidArgument("federated: vehicles must be >= 1");
    if (local_epochs < 1) {
      throw InvalidArgument("federated: local_epochs must be >= 1");
    }
    if (!(server_lr > 0.0)) {
      throw InvalidArgument("federated: server_lr must be > 0");
    }
    if (!(schedule.initial > 0.0)) {
      throw InvalidArgument("federated: local learning rate must be > 0");
    }
    if (schedule.decay < 0.0) {
      throw InvalidArgument("federated: decay must be >= 0");
    }
    if (batch < 2) throw InvalidArgument("federated: batch must be >= 2");
    if (target_k < 1) throw InvalidArgument("federated: target_k must be >= 1");
  }
};

// One vehicle. Owns its data view, local model and RNG stream.
struct ClientState {
  std::size_t id = 0;
  std::vector<std::size_t> indices;
  nn::ModelState local;
  std::uint64_t steps = 0;
  std::mt19937_64 rng;
};

inline std::uint64_t client_stream_seed(std::uint64_t shuffle_seed,
                                        std::size_t vehicle) {
  return derive_seed(shuffle_seed, streams::kShuffle, vehicle);
}

// Resets the client to the global model, runs local_epochs of mini-batch
// SGD over its data and returns g_v = theta_v(after) - theta(before).
// The difference is formed in double, where it is exact.
inline std::vector<double> local_round(ClientState& client,
                                      const nn::Network<float>& net,
                                      const nn::ModelState& global,
                                      std::size_t local_epochs,
                                      const LocalSchedule& schedule,
                                      std::size_t batch, const EncodedSet& data) {
  if (client.indices.empty()) {
    throw InvalidArgument("local_round: vehicle " + std::to_string(client.id) +
                          " has no local data");
  }
  if (global.params.size() != net.param_count()) {
    throw InvalidArgument("local_round: global model has wrong length");
  }
  client.local = global;
  for (std::size_t e = 0; e < local_epochs; ++e) {
    sgd_epoch(net, client.local, data, client.indices, batch, schedule,
              client.steps, client.rng);
  }
  std::vector<double> delta(global.params.size());
  for (std::size_t k = 0; k < delta.size(); ++k) {
    delta[k] = static_cast<double>(client.local.params[k]) -
               static_cast<double>(global.params[k]);
  }
  return delta;
}

// theta + (mu / V) * sum_v g_v, summed in vehicle order.
inline std::vector<float> aggregate(std::span<const float> theta_prev,
                                    std::span<const std::vector<double>> deltas,
                                    double server_lr) {
  if (deltas.empty()) throw InvalidArgument("aggregate: no client deltas");
  std::vector<double> sum(theta_prev.size(), 0.0);
  for (std::size_t v = 0; v < deltas.size(); ++v) {
    if (deltas[v].size() != theta_prev.size()) {
      throw InvalidArgument("aggregate: delta from vehicle " +
                            std::to_string(v) + " has length " +
                            std::to_string(deltas[v].size()) + ", expected " +
                            std::to_string(theta_prev.size()));
    }
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += deltas[v][k];
  }
  const double scale = server_lr / static_cast<double>(deltas.size());
  std::vector<float> out(theta_prev.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<float>(static_cast<double>(theta_prev[k]) + scale * sum[k]);
  }
  return out;
}

// Unweighted mean of the clients' batch-norm running statistics.
inline nn::BatchNormState<float> average_batch_norm(
    std::span<const ClientState> clients) {
  auto out = clients.front().local.bn;
  for (std::size_t k = 0; k < out.mean.size(); ++k) {
    double m = 0.0;
    double v = 0.0;
    for (const auto& c : clients) {
      m += c.local.bn.mean[k];
      v += c.local.bn.var[k];
    }
    out.mean[k] = static_cast<float>(m / static_cast<double>(clients.size()));
    out.var[k] = static_cast<float>(v / static_cast<double>(clients.size()));
  }
  return out;
}

struct RoundLog {
  std::size_t round = 0;  // aggregation count, 1-based
  double top1 = 0.0;
  double topk = 0.0;
  std::optional<double> throughput_ratio;
  std::uint64_t o_ul = 0;  // cumulative float32 variables, uplink
  std::uint64_t o_dl = 0;  // cumulative float32 variables, downlink
  double wall_ms = 0.0;
};

struct Overhead {
  std::uint64_t uplink = 0;
  std::uint64_t downlink = 0;
};

// O_UL = V * N_a * |theta|, O_DL = N_a * |theta|.
constexpr Overhead communication_overhead(std::uint64_t vehicles,
                                          std::uint64_t rounds,
                                          std::uint64_t params) {
  return {vehicles * rounds * params, rounds * params};
}

struct FedResult {
  nn::ModelState model;
  std::vector<RoundLog> logs;
};

// Called after each logged round; return false to stop early.
using RoundCallback = std::function<bool(const RoundLog&, const nn::ModelState&)>;

inline std::vector<ClientState> make_clients(const Partition& partition,
                                             const FedConfig& cfg) {
  std::vector<ClientState> clients(partition.vehicles());
  for (std::size_t v = 0; v < clients.size(); ++v) {
    clients[v].id = v;
    clients[v].indices = partition.assignments[v];
    std::sort(clients[v].indices.begin(), clients[v].indices.end());
    clients[v].rng.seed(client_stream_seed(cfg.shuffle_seed, v));
  }
  return clients;
}

// Federated averaging with full participation. Deterministic for a fixed
// config; cfg.workers only changes how many clients train at once.
inline FedResult run_federated(const FedConfig& cfg, const EncodedSet& train,
                               const EncodedSet& test,
                               const nn::ArchitectureSpec& spec,
                               const Partition& partition,
                               std::optional<nn::ModelState> init = std::nullopt,
                               const RoundCallback& on_round = {}) {
  cfg.validate();
  if (partition.vehicles() != cfg.vehicles) {
    throw InvalidArgument("run_federated: partition has " +
                          std::to_string(partition.vehicles()) +
                          " vehicles, config says " +
                          std::to_string(cfg.vehicles));
  }
  if (test.size() == 0) throw InvalidArgument("run_federated: empty test set");
  nn::Network<float> net(spec);
  FedResult result{init ? *init : nn::init_params(spec, cfg.init_seed), {}};
  auto& global = result.model;
  if (global.params.size() != net.param_count()) {
    throw InvalidArgument("run_federated: initial model does not match spec");
  }
  auto clients = make_clients(partition, cfg);
  const std::uint64_t n_params = net.param_count();
  const std::size_t k_eval = std::min(cfg.target_k, spec.classes);
  std::vector<std::vector<double>> deltas(clients.size());

  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    const auto t0 = std::chrono::steady_clock::now();
    auto run_client = [&](std::size_t v) {
      if (cfg.reset_schedule_each_round) clients[v].steps = 0;
      deltas[v] = local_round(clients[v], net, global, cfg.local_epochs,
                              cfg.schedule, cfg.batch, train);
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, clients.size()));
    if (workers == 1) {
      for (std::size_t v = 0; v < clients.size(); ++v) run_client(v);
    } else {
      std::vector<std::exception_ptr> errors(clients.size());
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t v = w; v < clients.size(); v += workers) {
            try {
              run_client(v);
            } catch (...) {
              errors[v] = std::current_exception();
            }
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    global.params = aggregate(global.params, deltas, cfg.server_lr);
    global.bn = average_batch_norm(clients);
    for (std::size_t k = 0; k < global.params.size(); ++k) {
      if (!std::isfinite(global.params[k])) {
        throw NumericError("federated model became non-finite in round " +
                           std::to_string(round) + " (parameter " +
                           std::to_string(k) + ")");
      }
    }

    const auto report = evaluate(global, test, k_eval);
    RoundLog log;
    log.round = round;
    log.top1 = report.accuracy_at(1);
    log.topk = report.accuracy_at(k_eval);
    log.throughput_ratio = report.throughput_at(k_eval);
    const auto overhead = communication_overhead(cfg.vehicles, round, n_params);
    log.o_ul = overhead.uplink;
    log.o_dl = overhead.downlink;
    log.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.logs.push_back(log);
    if (on_round && !on_round(log, global)) break;
    if (cfg.stop_at_target && log.topk > cfg.target_accuracy) break;
  }
  return result;
}

inline FedResult run_federated(const FedConfig& cfg, const EncodedSet& train,
                               const EncodedSet& test,
                               const nn::ArchitectureSpec& spec) {
  return run_federated(cfg, train, test, spec,
                       partition_uniform(train.size(), cfg.vehicles,
                                         cfg.partition_seed));
}

// First round whose top-K accuracy exceeds the threshold, or nullopt.
inline std::optional<std::size_t> rounds_to_accuracy(
    std::span<const RoundLog> logs, double threshold) {
  for (const auto& log : logs) {
    if (log.topk > threshold) return log.round;
  }
  return std::nullopt;
}

}  // namespace fedbeam
