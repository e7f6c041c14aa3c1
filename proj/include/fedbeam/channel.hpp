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
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedbeam/error.hpp"

namespace fedbeam {

using Complex = std::complex<double>;
using BeamVector = std::vector<Complex>;

// Flat beam-pair label, transmit-major: label = tx * rx_beams + rx.
using BeamLabel = std::uint32_t;

// Ordered prediction set, highest score first.
using BeamSet = std::vector<BeamLabel>;

struct BeamCodebook {
  std::vector<BeamVector> tx;
  std::vector<BeamVector> rx;

  std::size_t tx_beams() const noexcept { return tx.size(); }
  std::size_t rx_beams() const noexcept { return rx.size(); }
  std::size_t tx_antennas() const noexcept {
    return tx.empty() ? 0 : tx.front().size();
  }
  std::size_t rx_antennas() const noexcept {
    return rx.empty() ? 0 : rx.front().size();
  }
  std::size_t pairs() const noexcept { return tx.size() * rx.size(); }

  // Throws InvalidArgument unless every vector is unit-norm and the two
  // sides have consistent antenna counts.
  void validate(double tol = 1e-6) const {
    auto check = [tol](const std::vector<BeamVector>& side, const char* name) {
      if (side.empty()) {
        throw InvalidArgument(std::string(name) + " codebook is empty");
      }
      for (std::size_t i = 0; i < side.size(); ++i) {
        if (side[i].size() != side.front().size()) {
          throw InvalidArgument(std::string(name) + " beam " +
                                std::to_string(i) + " has inconsistent length");
        }
        double norm2 = 0.0;
        for (const auto& c : side[i]) norm2 += std::norm(c);
        if (std::abs(std::sqrt(norm2) - 1.0) > tol) {
          throw InvalidArgument(std::string(name) + " beam " +
                                std::to_string(i) + " is not unit norm");
        }
      }
    };
    check(tx, "tx");
    check(rx, "rx");
  }
};

// Dense complex matrix, row-major.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), data(r * c, Complex{0.0, 0.0}) {}

  Complex& operator()(std::size_t r, std::size_t c) {
    return data[r * cols + c];
  }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
};

// Per-subcarrier downlink channel matrices, each N_r x N_t.
struct ChannelSet {
  std::size_t rx_antennas = 0;
  std::size_t tx_antennas = 0;
  std::vector<ComplexMatrix> subcarriers;

  ChannelSet() = default;
  ChannelSet(std::size_t n_r, std::size_t n_t, std::size_t n_c)
      : rx_antennas(n_r),
        tx_antennas(n_t),
        subcarriers(n_c, ComplexMatrix(n_r, n_t)) {}
};

// y(i, j): received power for transmit beam i and receive beam j.
struct PowerMatrix {
  std::size_t tx_beams = 0;
  std::size_t rx_beams = 0;
  std::vector<double> y;

  double operator()(std::size_t i, std::size_t j) const {
    return y[i * rx_beams + j];
  }
  std::size_t size() const noexcept { return y.size(); }
};

// Uniform-linear-array response toward a direction whose cosine with the
// array axis is cos_to_axis, half-wavelength spacing, unit norm.
inline BeamVector ula_steering(std::size_t antennas, double cos_to_axis) {
  BeamVector a(antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
  for (std::size_t m = 0; m < antennas; ++m) {
    a[m] = std::polar(scale, -std::numbers::pi * static_cast<double>(m) *
                                 cos_to_axis);
  }
  return a;
}

// DFT beams: element m of beam i is exp(-j 2 pi m i / beams) / sqrt(antennas).
inline std::vector<BeamVector> dft_codebook(std::size_t antennas,
                                            std::size_t beams) {
  if (antennas == 0 || beams == 0) {
    throw InvalidArgument("dft_codebook: antennas and beams must be >= 1");
  }
  std::vector<BeamVector> book(beams, BeamVector(antennas));
  const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
  for (std::size_t i = 0; i < beams; ++i) {
    for (std::size_t m = 0; m < antennas; ++m) {
      // Reduce m*i modulo beams first so large products keep full precision.
      const auto k = static_cast<double>((m * i) % beams);
      book[i][m] = std::polar(
          scale, -2.0 * std::numbers::pi * k / static_cast<double>(beams));
    }
  }
  return book;
}

inline BeamCodebook make_dft_codebook(std::size_t tx_antennas,
                                      std::size_t tx_beams,
                                      std::size_t rx_antennas,
                                      std::size_t rx_beams) {
  return BeamCodebook{dft_codebook(tx_antennas, tx_beams),
                      dft_codebook(rx_antennas, rx_beams)};
}

// y_ij = sum_n |w_j^H H_n f_i|^2.
inline PowerMatrix beam_powers(const ChannelSet& ch, const BeamCodebook& cb) {
  if (cb.tx.empty() || cb.rx.empty()) {
    throw InvalidArgument("beam_powers: empty codebook");
  }
  if (cb.tx_antennas() != ch.tx_antennas ||
      cb.rx_antennas() != ch.rx_antennas) {
    throw InvalidArgument("beam_powers: codebook is " +
                          std::to_string(cb.rx_antennas()) + "x" +
                          std::to_string(cb.tx_antennas()) +
                          " but channel is " + std::to_string(ch.rx_antennas) +
                          "x" + std::to_string(ch.tx_antennas));
  }
  const std::size_t n_r = ch.rx_antennas;
  const std::size_t n_t = ch.tx_antennas;
  PowerMatrix out{cb.tx_beams(), cb.rx_beams(),
                  std::vector<double>(cb.pairs(), 0.0)};
  std::vector<Complex> hf(n_r);
  for (const auto& h : ch.subcarriers) {
    if (h.rows != n_r || h.cols != n_t) {
      throw InvalidArgument("beam_powers: subcarrier matrix shape mismatch");
    }
    for (std::size_t i = 0; i < cb.tx_beams(); ++i) {
      const auto& f = cb.tx[i];
      for (std::size_t r = 0; r < n_r; ++r) {
        Complex acc{0.0, 0.0};
        for (std::size_t t = 0; t < n_t; ++t) acc += h(r, t) * f[t];
        hf[r] = acc;
      }
      for (std::size_t j = 0; j < cb.rx_beams(); ++j) {
        const auto& w = cb.rx[j];
        Complex g{0.0, 0.0};
        for (std::size_t r = 0; r < n_r; ++r) g += std::conj(w[r]) * hf[r];
        out.y[i * cb.rx_beams() + j] += std::norm(g);
      }
    }
  }
  return out;
}

// Index of the first maximum.
template <typename T>
BeamLabel argmax_first(std::span<const T> values) {
  if (values.empty()) throw InvalidArgument("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return static_cast<BeamLabel>(best);
}

inline BeamLabel optimal_beam(const PowerMatrix& y) {
  return argmax_first(std::span<const double>(y.y));
}

// The k highest-scoring labels, descending, lower index first on ties.
template <typename T>
BeamSet topk(std::span<const T> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) {
    throw InvalidArgument("topk: K=" + std::to_string(k) +
                          " outside [1, " + std::to_string(scores.size()) +
                          "]");
  }
  std::vector<BeamLabel> idx(scores.size());
  std::iota(idx.begin(), idx.end(), BeamLabel{0});
  auto better = [&scores](BeamLabel a, BeamLabel b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), better);
  idx.resize(k);
  return idx;
}

inline double topk_accuracy(std::span<const BeamSet> predictions,
                            std::span<const BeamLabel> labels) {
  if (predictions.size() != labels.size()) {
    throw InvalidArgument("topk_accuracy: " +
                          std::to_string(predictions.size()) +
                          " predictions vs " + std::to_string(labels.size()) +
                          " labels");
  }
  if (labels.empty()) throw InvalidArgument("topk_accuracy: no samples");
  std::size_t hits = 0;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    const auto& set = predictions[s];
    if (std::find(set.begin(), set.end(), labels[s]) != set.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

// Top-K throughput ratio
//   R = sum_t log2(1 + y_t[best in S_t]) / sum_t log2(1 + y_t[optimum]).
// Row is any contiguous range of powers (flattened y). Returns nullopt when
// any sample lacks powers.
template <typename Row>
std::optional<double> throughput_ratio(std::span<const std::optional<Row>> rows,
                                       std::span<const BeamSet> predictions) {
  if (rows.size() != predictions.size()) {
    throw InvalidArgument("throughput_ratio: " + std::to_string(rows.size()) +
                          " power rows vs " +
                          std::to_string(predictions.size()) + " predictions");
  }
  if (predictions.empty()) {
    throw InvalidArgument("throughput_ratio: no samples");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (!rows[s]) return std::nullopt;
    const auto& y = *rows[s];
    if (y.empty()) return std::nullopt;
    double best_all = 0.0;
    for (auto v : y) best_all = std::max(best_all, static_cast<double>(v));
    double best_in_set = 0.0;
    for (BeamLabel b : predictions[s]) {
      if (b >= y.size()) {
        throw InvalidArgument("throughput_ratio: label " + std::to_string(b) +
                              " out of range");
      }
      best_in_set = std::max(best_in_set, static_cast<double>(y[b]));
    }
    num += std::log2(1.0 + best_in_set);
    den += std::log2(1.0 + best_all);
  }
  // All-zero channels everywhere: every choice is optimal.
  if (den == 0.0) return 1.0;
  return num / den;
}

}  // namespace fedbeam
