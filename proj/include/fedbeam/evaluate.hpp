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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedbeam/channel.hpp"
#include "fedbeam/encoded.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/nn/network.hpp"

namespace fedbeam {

// Per-K metrics for K = 1..k_max (index K-1).
struct EvalReport {
  std::size_t k_max = 0;
  std::size_t samples = 0;
  std::vector<double> accuracy;
  // Absent when any test sample lacks powers.
  std::optional<std::vector<double>> throughput_ratio;
  std::size_t params = 0;
  std::uint64_t flops = 0;

  double accuracy_at(std::size_t k) const { return accuracy.at(k - 1); }
  std::optional<double> throughput_at(std::size_t k) const {
    if (!throughput_ratio) return std::nullopt;
    return throughput_ratio->at(k - 1);
  }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Eval-mode softmax outputs, one row per sample. Rows do not depend on the
// batching, so chunking is only a memory bound.
inline std::vector<float> predict(const nn::ModelState& model,
                                  const EncodedSet& data,
                                  std::size_t chunk = 64) {
  nn::Network<float> net(model.spec);
  if (data.input_size != net.input_size()) {
    throw InvalidArgument("evaluate: data tensors have " +
                          std::to_string(data.input_size) +
                          " values, model expects " +
                          std::to_string(net.input_size()));
  }
  if (data.classes != 0 && data.classes != net.classes()) {
    throw InvalidArgument("evaluate: data has " + std::to_string(data.classes) +
                          " classes, model outputs " +
                          std::to_string(net.classes()));
  }
  std::vector<float> probs;
  probs.reserve(data.size() * net.classes());
  auto bn = model.bn;
  for (std::size_t start = 0; start < data.size(); start += chunk) {
    const std::size_t n = std::min(chunk, data.size() - start);
    std::span<const float> in(data.inputs.data() + start * data.input_size,
                              n * data.input_size);
    const auto rows = net.forward(model.params, bn, in, n, nn::Mode::kEval);
    probs.insert(probs.end(), rows.begin(), rows.end());
  }
  return probs;
}

inline EvalReport evaluate(const nn::ModelState& model, const EncodedSet& test,
                           std::size_t k_max) {
  if (test.size() == 0) throw InvalidArgument("evaluate: empty test set");
  const std::size_t classes = model.spec.classes;
  if (k_max < 1 || k_max > classes) {
    throw InvalidArgument("evaluate: k_max=" + std::to_string(k_max) +
                          " outside [1, " + std::to_string(classes) + "]");
  }
  const auto probs = predict(model, test);
  std::vector<BeamSet> ranked(test.size());
  for (std::size_t s = 0; s < test.size(); ++s) {
    ranked[s] = topk(std::span<const float>(probs.data() + s * classes, classes),
                     k_max);
  }
  EvalReport report;
  report.k_max = k_max;
  report.samples = test.size();
  report.params = nn::count_params(model.spec);
  report.flops = nn::count_flops(model.spec);
  std::vector<double> ratios;
  bool have_ratio = true;
  std::vector<BeamSet> sets(test.size());
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t s = 0; s < test.size(); ++s) {
      sets[s].assign(ranked[s].begin(),
                     ranked[s].begin() + static_cast<std::ptrdiff_t>(k));
    }
    report.accuracy.push_back(topk_accuracy(sets, test.labels));
    if (have_ratio) {
      auto r = throughput_ratio(
          std::span<const std::optional<std::vector<float>>>(test.powers), sets);
      if (r) {
        ratios.push_back(*r);
      } else {
        have_ratio = false;
      }
    }
  }
  if (have_ratio) report.throughput_ratio = std::move(ratios);
  return report;
}

}  // namespace fedbeam
