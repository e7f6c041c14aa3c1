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

#include "fedbeam/encoded.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/synthetic.hpp"

namespace fedbeam::testing {

// 10 x 100 grid of 1 m cells over the default street.
inline GridConfig coarse_grid() {
  GridConfig g;
  g.cells_x = 10;
  g.cells_y = 100;
  return g;
}

inline SynthConfig small_scene() {
  SynthConfig cfg;
  cfg.tx_beams = cfg.tx_antennas = 4;
  cfg.rx_beams = cfg.rx_antennas = 2;
  cfg.subcarriers = 2;
  cfg.obstacles = 3;
  return cfg;
}

inline EncodedSet small_encoded(std::size_t n, std::uint64_t seed) {
  return encode(generate_synthetic(small_scene(), n, seed), coarse_grid());
}

inline nn::ArchitectureSpec small_spec() {
  return nn::default_architecture(10, 100, 8);
}

}  // namespace fedbeam::testing
