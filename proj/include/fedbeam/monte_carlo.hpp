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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "fedbeam/error.hpp"

namespace fedbeam {

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;  // 95% Student-t
  std::vector<double> values;
};

using MetricMap = std::map<std::string, double>;

// Two-sided 95% Student-t half-width of the mean of 'values'.
inline Interval t_interval(const std::vector<double>& values,
                           double confidence = 0.95) {
  if (values.size() < 2) {
    throw InvalidArgument("confidence interval needs at least 2 runs");
  }
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  return {mean, t * sd / std::sqrt(n), values};
}

// Runs run(base_seed + i) for i in [0, n_runs) and summarizes every metric
// the runs report.
inline std::map<std::string, Interval> monte_carlo(
    const std::function<MetricMap(std::uint64_t seed)>& run,
    std::size_t n_runs, std::uint64_t base_seed) {
  if (n_runs < 2) throw InvalidArgument("monte_carlo: n_runs must be >= 2");
  std::map<std::string, std::vector<double>> samples;
  for (std::size_t i = 0; i < n_runs; ++i) {
    for (const auto& [name, value] : run(base_seed + i)) {
      samples[name].push_back(value);
    }
  }
  std::map<std::string, Interval> out;
  for (const auto& [name, values] : samples) {
    if (values.size() != n_runs) {
      throw InvalidArgument("monte_carlo: metric '" + name +
                            "' missing from some runs");
    }
    out[name] = t_interval(values);
  }
  return out;
}

}  // namespace fedbeam
