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
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fedbeam/channel.hpp"
#include "fedbeam/dataset.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/random.hpp"

namespace fedbeam {

// Desk-scale street scene generator. Geometry is 2D (top view): the street
// runs along y, the BS sits beside it with its array axis along y, and the
// vehicle's array axis is also along y (direction of travel).
struct SynthConfig {
  AreaBox area{0.0F, 0.0F, 10.0F, 100.0F};
  Vec3 bs_pos{-12.0F, 50.0F, 6.0F};
  float vehicle_height = 1.8F;

  std::size_t obstacles = 6;
  double obstacle_width_min = 1.6;  // extent in x
  double obstacle_width_max = 2.6;
  double obstacle_length_min = 3.5;  // extent in y
  double obstacle_length_max = 6.0;
  double obstacle_height_min = 1.4;
  double obstacle_height_max = 3.0;

  std::uint16_t tx_beams = 16;
  std::uint16_t rx_beams = 4;
  std::uint16_t tx_antennas = 16;
  std::uint16_t rx_antennas = 4;
  std::uint16_t subcarriers = 8;
  double subcarrier_spacing_hz = 2.0e6;

  double los_gain = 1.0;
  double reflection_gain = 0.3;
  double reflection_ref_length_m = 50.0;
  double point_spacing_m = 0.5;

  std::size_t max_retries = 1000;

  void validate() const {
    if (!(area.x_max > area.x_min) || !(area.y_max > area.y_min)) {
      throw InvalidArgument("synthetic: area box is degenerate");
    }
    if (tx_beams < 1 || rx_beams < 1 || tx_antennas < 1 || rx_antennas < 1 ||
        subcarriers < 1) {
      throw InvalidArgument(
          "synthetic: beam, antenna and subcarrier counts must be >= 1");
    }
    if (std::size_t{tx_beams} * rx_beams > 65536) {
      throw InvalidArgument("synthetic: more than 65536 beam pairs");
    }
    if (!(obstacle_width_min > 0.0) || obstacle_width_max < obstacle_width_min ||
        !(obstacle_length_min > 0.0) ||
        obstacle_length_max < obstacle_length_min ||
        obstacle_height_max < obstacle_height_min ||
        !(point_spacing_m > 0.0)) {
      throw InvalidArgument("synthetic: obstacle size ranges are invalid");
    }
    if (obstacle_width_max > area.x_max - area.x_min ||
        obstacle_length_max > area.y_max - area.y_min) {
      throw InvalidArgument("synthetic: obstacles do not fit in the area");
    }
  }
};

namespace geom {

struct P2 {
  double x = 0.0;
  double y = 0.0;
};

// Axis-aligned box in the ground plane with a height.
struct Box {
  double x0, y0, x1, y1, height;

  bool contains(P2 p) const noexcept {
    return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
  }
};

// True when the open segment a->b passes through the interior of the box.
// Slab clipping; touching an edge or a corner does not count.
inline bool segment_hits(P2 a, P2 b, const Box& box) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double d[2] = {b.x - a.x, b.y - a.y};
  const double lo[2] = {box.x0 - a.x, box.y0 - a.y};
  const double hi[2] = {box.x1 - a.x, box.y1 - a.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (lo[k] >= 0.0 || hi[k] <= 0.0) return false;
      continue;
    }
    double ta = lo[k] / d[k];
    double tb = hi[k] / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return false;
  }
  constexpr double kEps = 1e-9;
  return t1 - t0 > kEps;
}

// One face of a box: the segment from a to b with an outward normal.
struct Face {
  P2 a, b;
  P2 normal;
  bool vertical;  // face lies on a line x = const
};

inline std::vector<Face> faces(const Box& box) {
  return {
      {{box.x0, box.y0}, {box.x0, box.y1}, {-1.0, 0.0}, true},
      {{box.x1, box.y0}, {box.x1, box.y1}, {1.0, 0.0}, true},
      {{box.x0, box.y0}, {box.x1, box.y0}, {0.0, -1.0}, false},
      {{box.x0, box.y1}, {box.x1, box.y1}, {0.0, 1.0}, false},
  };
}

inline bool in_front(const Face& f, P2 p) {
  return (p.x - f.a.x) * f.normal.x + (p.y - f.a.y) * f.normal.y > 0.0;
}

inline double dist(P2 a, P2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace geom

// A propagation path in the 2D scene.
struct ScenePath {
  double gain = 0.0;
  double length_m = 0.0;
  double departure_cos = 0.0;  // cosine of departure direction vs BS array axis
  double arrival_cos = 0.0;    // cosine of arrival direction vs vehicle array axis
};

struct Scene {
  geom::P2 bs;
  geom::P2 vehicle;
  std::vector<geom::Box> obstacles;
};

// LoS (if unobstructed) plus one specular reflection per obstacle face.
inline std::vector<ScenePath> trace_paths(const Scene& scene,
                                          const SynthConfig& cfg) {
  using geom::P2;
  std::vector<ScenePath> paths;
  const P2 bs = scene.bs;
  const P2 veh = scene.vehicle;
  auto blocked = [&scene](P2 a, P2 b, std::size_t skip) {
    for (std::size_t k = 0; k < scene.obstacles.size(); ++k) {
      if (k != skip && geom::segment_hits(a, b, scene.obstacles[k])) return true;
    }
    return false;
  };
  auto direction_cos = [](P2 from, P2 to) {
    const double d = geom::dist(from, to);
    return d > 0.0 ? (to.y - from.y) / d : 0.0;
  };

  const std::size_t none = scene.obstacles.size();
  if (!blocked(bs, veh, none)) {
    paths.push_back({cfg.los_gain, geom::dist(bs, veh), direction_cos(bs, veh),
                     direction_cos(veh, bs)});
  }
  for (std::size_t k = 0; k < scene.obstacles.size(); ++k) {
    for (const auto& face : geom::faces(scene.obstacles[k])) {
      if (!geom::in_front(face, bs) || !geom::in_front(face, veh)) continue;
      // Mirror the BS across the face's supporting line.
      P2 image = bs;
      if (face.vertical) {
        image.x = 2.0 * face.a.x - bs.x;
      } else {
        image.y = 2.0 * face.a.y - bs.y;
      }
      // Intersection of image->vehicle with the face line.
      P2 hit;
      if (face.vertical) {
        const double t = (face.a.x - image.x) / (veh.x - image.x);
        hit = {face.a.x, image.y + t * (veh.y - image.y)};
        if (hit.y < face.a.y || hit.y > face.b.y) continue;
      } else {
        const double t = (face.a.y - image.y) / (veh.y - image.y);
        hit = {image.x + t * (veh.x - image.x), face.a.y};
        if (hit.x < face.a.x || hit.x > face.b.x) continue;
      }
      if (blocked(bs, hit, k) || blocked(hit, veh, k)) continue;
      const double length = geom::dist(image, veh);
      const double gain = cfg.reflection_gain /
                          (1.0 + length / cfg.reflection_ref_length_m);
      paths.push_back({gain, length, direction_cos(bs, hit),
                       direction_cos(veh, hit)});
    }
  }
  return paths;
}

// H_n = sum_p g_p exp(-j 2 pi n tau_p df) a_r(p) a_t(p)^H.
inline ChannelSet build_channel(const std::vector<ScenePath>& paths,
                                const SynthConfig& cfg) {
  constexpr double kSpeedOfLight = 299792458.0;
  ChannelSet ch(cfg.rx_antennas, cfg.tx_antennas, cfg.subcarriers);
  for (const auto& p : paths) {
    const auto a_t = ula_steering(cfg.tx_antennas, p.departure_cos);
    const auto a_r = ula_steering(cfg.rx_antennas, p.arrival_cos);
    const double tau = p.length_m / kSpeedOfLight;
    for (std::size_t n = 0; n < cfg.subcarriers; ++n) {
      const Complex coeff = std::polar(
          p.gain, -2.0 * std::numbers::pi * static_cast<double>(n) * tau *
                      cfg.subcarrier_spacing_hz);
      auto& h = ch.subcarriers[n];
      for (std::size_t r = 0; r < h.rows; ++r) {
        const Complex ar = coeff * a_r[r];
        for (std::size_t t = 0; t < h.cols; ++t) {
          h(r, t) += ar * std::conj(a_t[t]);
        }
      }
    }
  }
  return ch;
}

// Obstacle faces visible from the vehicle, sampled every point_spacing_m
// along the face and in height.
inline PointCloud sample_visible_points(const Scene& scene,
                                        const SynthConfig& cfg) {
  PointCloud cloud;
  const double step = cfg.point_spacing_m;
  for (std::size_t k = 0; k < scene.obstacles.size(); ++k) {
    const auto& box = scene.obstacles[k];
    for (const auto& face : geom::faces(box)) {
      if (!geom::in_front(face, scene.vehicle)) continue;
      const double len = geom::dist(face.a, face.b);
      for (double s = 0.5 * step; s < len; s += step) {
        const double t = s / len;
        const geom::P2 p{face.a.x + t * (face.b.x - face.a.x),
                         face.a.y + t * (face.b.y - face.a.y)};
        bool hidden = false;
        for (std::size_t o = 0; o < scene.obstacles.size() && !hidden; ++o) {
          if (o != k &&
              geom::segment_hits(scene.vehicle, p, scene.obstacles[o])) {
            hidden = true;
          }
        }
        if (hidden) continue;
        for (double z = 0.5 * step; z < box.height; z += step) {
          cloud.push_back({static_cast<float>(p.x), static_cast<float>(p.y),
                           static_cast<float>(z)});
        }
      }
    }
  }
  return cloud;
}

inline BeamCodebook synthetic_codebook(const SynthConfig& cfg) {
  return make_dft_codebook(cfg.tx_antennas, cfg.tx_beams, cfg.rx_antennas,
                           cfg.rx_beams);
}

// Draws one scene. Returns nullopt when the geometry is degenerate (BS or
// vehicle inside an obstacle, or no propagation path at all).
template <typename Rng>
std::optional<Sample> draw_scene(const SynthConfig& cfg,
                                 const BeamCodebook& codebook, Rng& rng) {
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const auto& area = cfg.area;
  Scene scene;
  scene.bs = {cfg.bs_pos.x, cfg.bs_pos.y};
  for (std::size_t k = 0; k < cfg.obstacles; ++k) {
    const double w = uniform(cfg.obstacle_width_min, cfg.obstacle_width_max);
    const double l = uniform(cfg.obstacle_length_min, cfg.obstacle_length_max);
    const double h = uniform(cfg.obstacle_height_min, cfg.obstacle_height_max);
    const double x0 = uniform(area.x_min, area.x_max - w);
    const double y0 = uniform(area.y_min, area.y_max - l);
    scene.obstacles.push_back({x0, y0, x0 + w, y0 + l, h});
  }
  scene.vehicle = {uniform(area.x_min, area.x_max),
                   uniform(area.y_min, area.y_max)};
  for (const auto& box : scene.obstacles) {
    if (box.contains(scene.bs) || box.contains(scene.vehicle)) {
      return std::nullopt;
    }
  }
  const auto paths = trace_paths(scene, cfg);
  if (paths.empty()) return std::nullopt;

  const auto y = beam_powers(build_channel(paths, cfg), codebook);
  Sample s;
  s.cloud = sample_visible_points(scene, cfg);
  if (s.cloud.size() > kMaxCloudPoints) return std::nullopt;
  s.vehicle_pos = {static_cast<float>(scene.vehicle.x),
                   static_cast<float>(scene.vehicle.y), cfg.vehicle_height};
  s.bs_pos = cfg.bs_pos;
  std::vector<float> powers(y.y.size());
  std::transform(y.y.begin(), y.y.end(), powers.begin(),
                 [](double v) { return static_cast<float>(v); });
  // Label from the stored float32 row.
  s.label = label_from_powers(powers);
  s.powers = std::move(powers);
  return s;
}

inline DatasetMeta synthetic_meta(const SynthConfig& cfg, std::uint64_t seed) {
  DatasetMeta meta;
  meta.tx_beams = cfg.tx_beams;
  meta.rx_beams = cfg.rx_beams;
  meta.tx_antennas = cfg.tx_antennas;
  meta.rx_antennas = cfg.rx_antennas;
  meta.subcarriers = cfg.subcarriers;
  meta.area = cfg.area;
  meta.seed = seed;
  return meta;
}

// n scenes, deterministic in (cfg, n, seed). Scene i draws from its own
// stream, so a prefix of a larger dataset equals the smaller dataset.
inline Dataset generate_synthetic(const SynthConfig& cfg, std::size_t n,
                                  std::uint64_t seed) {
  cfg.validate();
  const auto codebook = synthetic_codebook(cfg);
  Dataset ds;
  ds.meta = synthetic_meta(cfg, seed);
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, streams::kScene, i));
    std::optional<Sample> s;
    for (std::size_t attempt = 0; attempt <= cfg.max_retries && !s; ++attempt) {
      s = draw_scene(cfg, codebook, rng);
    }
    if (!s) {
      throw InvalidArgument("synthetic: scene " + std::to_string(i) +
                            " still degenerate after " +
                            std::to_string(cfg.max_retries) + " retries");
    }
    ds.samples.push_back(std::move(*s));
  }
  return ds;
}

}  // namespace fedbeam
