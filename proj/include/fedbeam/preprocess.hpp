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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedbeam/dataset.hpp"
#include "fedbeam/error.hpp"

namespace fedbeam {

// Top-view crop partitioned into equal square cells. x maps to rows
// (cells_x), y maps to columns (cells_y).
struct GridConfig {
  double x_min = 0.0;
  double x_max = 10.0;
  double y_min = 0.0;
  double y_max = 100.0;
  std::size_t cells_x = 20;
  std::size_t cells_y = 200;

  double cell_size() const noexcept {
    return (x_max - x_min) / static_cast<double>(cells_x);
  }

  void validate() const {
    if (!(x_max > x_min) || !(y_max > y_min)) {
      throw InvalidArgument("grid: box must have x_max > x_min, y_max > y_min");
    }
    if (cells_x < 1 || cells_y < 1) {
      throw InvalidArgument("grid: cell counts must be >= 1");
    }
    const double dx = (x_max - x_min) / static_cast<double>(cells_x);
    const double dy = (y_max - y_min) / static_cast<double>(cells_y);
    if (std::abs(dx - dy) > 1e-9) {
      throw InvalidArgument("grid: cells are not square (" +
                            std::to_string(dx) + " x " + std::to_string(dy) +
                            ")");
    }
  }

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

enum class CellCode : std::int8_t {
  kFree = 0,
  kOccupied = 1,
  kVehicle = -1,
  kBaseStation = -2,
};

struct OccupancyGrid {
  GridConfig config;
  std::vector<std::int8_t> cells;  // row-major [cx][cy]
  std::size_t discarded_points = 0;

  std::int8_t at(std::size_t cx, std::size_t cy) const {
    return cells[cx * config.cells_y + cy];
  }
};

namespace detail {
// Cell index along one axis; the upper edge is clamped into the last cell.
inline std::optional<std::size_t> bin(double v, double lo, double hi,
                                      double delta, std::size_t cells) {
  if (!(v >= lo) || !(v <= hi)) return std::nullopt;
  auto k = static_cast<std::size_t>(std::floor((v - lo) / delta));
  return k >= cells ? cells - 1 : k;
}
}  // namespace detail

// Maps (x, y) to its cell, or nullopt when outside the box.
inline std::optional<std::pair<std::size_t, std::size_t>> cell_of(
    const GridConfig& cfg, double x, double y) {
  const double delta = cfg.cell_size();
  auto cx = detail::bin(x, cfg.x_min, cfg.x_max, delta, cfg.cells_x);
  auto cy = detail::bin(y, cfg.y_min, cfg.y_max, delta, cfg.cells_y);
  if (!cx || !cy) return std::nullopt;
  return std::make_pair(*cx, *cy);
}

// Occupancy code 1 for cells with at least one point, then BS (-2), then
// vehicle (-1); later writes win, so the vehicle cell is always -1.
inline OccupancyGrid lidar_to_grid(const Sample& s, const GridConfig& cfg) {
  cfg.validate();
  const auto vehicle = cell_of(cfg, s.vehicle_pos.x, s.vehicle_pos.y);
  if (!vehicle) {
    const bool x_out = !(s.vehicle_pos.x >= cfg.x_min && s.vehicle_pos.x <= cfg.x_max);
    const std::string coord =
        x_out ? "x=" + std::to_string(s.vehicle_pos.x) + " outside [" +
                    std::to_string(cfg.x_min) + ", " + std::to_string(cfg.x_max) + "]"
              : "y=" + std::to_string(s.vehicle_pos.y) + " outside [" +
                    std::to_string(cfg.y_min) + ", " + std::to_string(cfg.y_max) + "]";
    throw InvalidArgument("lidar_to_grid: vehicle " + coord);
  }
  OccupancyGrid g;
  g.config = cfg;
  g.cells.assign(cfg.cells_x * cfg.cells_y,
                 static_cast<std::int8_t>(CellCode::kFree));
  auto set = [&g, &cfg](std::pair<std::size_t, std::size_t> c, CellCode code) {
    g.cells[c.first * cfg.cells_y + c.second] = static_cast<std::int8_t>(code);
  };
  for (const auto& p : s.cloud) {
    if (auto c = cell_of(cfg, p.x, p.y)) {
      set(*c, CellCode::kOccupied);
    } else {
      ++g.discarded_points;
    }
  }
  if (auto bs = cell_of(cfg, s.bs_pos.x, s.bs_pos.y)) {
    set(*bs, CellCode::kBaseStation);
  }
  set(*vehicle, CellCode::kVehicle);
  return g;
}

// Single-channel input tensor 1 x cells_x x cells_y holding the raw codes.
inline std::vector<float> grid_to_input(const OccupancyGrid& g) {
  return std::vector<float>(g.cells.begin(), g.cells.end());
}

inline void grid_to_input(const OccupancyGrid& g, std::span<float> out) {
  if (out.size() != g.cells.size()) {
    throw InvalidArgument("grid_to_input: output span has wrong size");
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = g.cells[k];
}

}  // namespace fedbeam
