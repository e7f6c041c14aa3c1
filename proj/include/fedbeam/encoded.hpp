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

#include <optional>
#include <span>
#include <vector>

#include "fedbeam/channel.hpp"
#include "fedbeam/dataset.hpp"
#include "fedbeam/preprocess.hpp"

namespace fedbeam {

// A dataset after preprocessing: one flattened grid tensor per sample plus
// labels and (optional) power rows. Immutable once built.
struct EncodedSet {
  std::size_t input_size = 0;
  std::size_t classes = 0;
  std::vector<float> inputs;
  std::vector<BeamLabel> labels;
  std::vector<std::optional<std::vector<float>>> powers;

  std::size_t size() const noexcept { return labels.size(); }

  std::span<const float> input(std::size_t i) const {
    return {inputs.data() + i * input_size, input_size};
  }

  // Copies the listed samples into contiguous batch buffers.
  void gather(std::span<const std::size_t> idx, std::vector<float>& batch_inputs,
              std::vector<BeamLabel>& batch_labels) const {
    batch_inputs.resize(idx.size() * input_size);
    batch_labels.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto src = input(idx[k]);
      std::copy(src.begin(), src.end(),
                batch_inputs.begin() + static_cast<std::ptrdiff_t>(k * input_size));
      batch_labels[k] = labels[idx[k]];
    }
  }
};

inline EncodedSet encode(const Dataset& ds, const GridConfig& grid) {
  grid.validate();
  EncodedSet out;
  out.input_size = grid.cells_x * grid.cells_y;
  out.classes = ds.meta.classes();
  out.inputs.resize(ds.size() * out.input_size);
  out.labels.reserve(ds.size());
  out.powers.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds.samples[i];
    const auto g = lidar_to_grid(s, grid);
    grid_to_input(g, std::span<float>(out.inputs.data() + i * out.input_size,
                                      out.input_size));
    out.labels.push_back(s.label);
    out.powers.push_back(s.powers);
  }
  return out;
}

}  // namespace fedbeam
