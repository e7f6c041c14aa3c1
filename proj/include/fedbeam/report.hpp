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
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedbeam/evaluate.hpp"
#include "fedbeam/fedavg.hpp"
#include "fedbeam/monte_carlo.hpp"

namespace fedbeam {

// Reference figures for the 2D model and the 3D point-cloud baseline.
namespace reference {
inline constexpr std::size_t kProposedParams = 7462;
inline constexpr double kProposedFlops = 1.72e6;
inline constexpr double kProposedTop10 = 0.9117;
inline constexpr double kProposedThroughput10 = 0.9478;
inline constexpr std::size_t kBaselineParams = 403677;
inline constexpr double kBaselineFlops = 179.01e6;
inline constexpr double kBaselineTop10 = 0.8392;
inline constexpr double kBaselineThroughput10 = 0.8615;
}  // namespace reference

inline nlohmann::json reference_json() {
  return {{"proposed_2d",
           {{"params", reference::kProposedParams},
            {"flops", reference::kProposedFlops},
            {"top10_accuracy", reference::kProposedTop10},
            {"top10_throughput_ratio", reference::kProposedThroughput10}}},
          {"baseline_3d",
           {{"params", reference::kBaselineParams},
            {"flops", reference::kBaselineFlops},
            {"top10_accuracy", reference::kBaselineTop10},
            {"top10_throughput_ratio", reference::kBaselineThroughput10}}}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["k_max"] = r.k_max;
  j["samples"] = r.samples;
  j["accuracy"] = r.accuracy;
  j["throughput_ratio"] =
      r.throughput_ratio ? nlohmann::json(*r.throughput_ratio) : nlohmann::json();
  j["params"] = r.params;
  j["flops"] = r.flops;
  return j;
}

inline nlohmann::json to_json(const std::map<std::string, Interval>& ci) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, iv] : ci) {
    j[name] = {{"mean", iv.mean}, {"half_width", iv.half_width},
               {"values", iv.values}};
  }
  return j;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// k,accuracy,throughput_ratio  (NA when the ratio is unavailable)
inline std::string sweep_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "k,accuracy,throughput_ratio\n";
  for (std::size_t k = 1; k <= r.k_max; ++k) {
    os << k << ',' << format_double(r.accuracy_at(k)) << ',';
    if (auto t = r.throughput_at(k)) {
      os << format_double(*t);
    } else {
      os << "NA";
    }
    os << '\n';
  }
  return os.str();
}

inline std::string rounds_csv_header() {
  return "round,top1_acc,topK_acc,throughput_ratio,o_ul_float32,o_dl_float32,"
         "wall_ms\n";
}

inline std::string rounds_csv_row(const RoundLog& log) {
  std::ostringstream os;
  os << log.round << ',' << format_double(log.top1) << ','
     << format_double(log.topk) << ','
     << (log.throughput_ratio ? format_double(*log.throughput_ratio) : "NA")
     << ',' << log.o_ul << ',' << log.o_dl << ',' << log.wall_ms << '\n';
  return os.str();
}

inline std::string rounds_csv(std::span<const RoundLog> logs) {
  std::string out = rounds_csv_header();
  for (const auto& log : logs) out += rounds_csv_row(log);
  return out;
}

}  // namespace fedbeam
