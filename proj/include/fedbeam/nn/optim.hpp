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
#include <span>
#include <string>
#include <vector>

#include "fedbeam/error.hpp"

namespace fedbeam::nn {

namespace detail {
template <typename T>
void check_step(std::span<const T> theta, std::span<const T> grad, double lr,
                const char* who) {
  if (theta.size() != grad.size()) {
    throw InvalidArgument(std::string(who) + ": parameter/gradient length " +
                          std::to_string(theta.size()) + " vs " +
                          std::to_string(grad.size()));
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw InvalidArgument(std::string(who) + ": step size must be > 0");
  }
  for (std::size_t k = 0; k < grad.size(); ++k) {
    if (!std::isfinite(grad[k])) {
      throw NumericError(std::string(who) + ": non-finite gradient at index " +
                         std::to_string(k));
    }
  }
}
}  // namespace detail

// theta -= lr * grad. Leaves theta untouched if grad has a non-finite entry.
template <typename T>
void sgd_step(std::span<T> theta, std::span<const T> grad, double lr) {
  detail::check_step<T>(theta, grad, lr, "sgd_step");
  const T rate = static_cast<T>(lr);
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= rate * grad[k];
}

template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, T(0)), v(n, T(0)) {}
};

// Bias-corrected Adam.
template <typename T>
void adam_step(AdamState<T>& state, std::span<T> theta, std::span<const T> grad,
               double lr) {
  detail::check_step<T>(theta, grad, lr, "adam_step");
  if (state.m.size() != theta.size()) {
    if (state.t != 0 || !state.m.empty()) {
      throw InvalidArgument("adam_step: optimizer state has wrong length");
    }
    state.m.assign(theta.size(), T(0));
    state.v.assign(theta.size(), T(0));
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const T g = grad[k];
    state.m[k] = b1 * state.m[k] + (T(1) - b1) * g;
    state.v[k] = b2 * state.v[k] + (T(1) - b2) * g * g;
    const double m_hat = static_cast<double>(state.m[k]) / c1;
    const double v_hat = static_cast<double>(state.v[k]) / c2;
    theta[k] -= static_cast<T>(lr * m_hat / (std::sqrt(v_hat) + state.eps));
  }
}

}  // namespace fedbeam::nn
