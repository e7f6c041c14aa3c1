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
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fedbeam/binary_io.hpp"
#include "fedbeam/channel.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/random.hpp"

namespace fedbeam {

struct Vec3 {
  float x = 0.0F;
  float y = 0.0F;
  float z = 0.0F;

  bool finite() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

using PointCloud = std::vector<Vec3>;

inline constexpr std::size_t kMaxCloudPoints = std::size_t{1} << 20;

struct Sample {
  PointCloud cloud;
  Vec3 vehicle_pos;
  Vec3 bs_pos;
  BeamLabel label = 0;
  // Flattened y_ij (transmit-major), linear scale.
  std::optional<std::vector<float>> powers;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct AreaBox {
  float x_min = 0.0F;
  float y_min = 0.0F;
  float x_max = 0.0F;
  float y_max = 0.0F;

  bool contains_xy(float x, float y) const noexcept {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  friend bool operator==(const AreaBox&, const AreaBox&) = default;
};

struct DatasetMeta {
  std::uint16_t tx_beams = 0;     // C_t
  std::uint16_t rx_beams = 0;     // C_r
  std::uint16_t tx_antennas = 0;  // N_t
  std::uint16_t rx_antennas = 0;  // N_r
  std::uint16_t subcarriers = 0;  // N_c
  AreaBox area;
  std::uint64_t seed = 0;

  std::size_t classes() const noexcept {
    return std::size_t{tx_beams} * rx_beams;
  }
  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Assignment of sample indices to vehicles 0..V-1.
struct Partition {
  std::vector<std::vector<std::size_t>> assignments;

  std::size_t vehicles() const noexcept { return assignments.size(); }
};

// Lowest-index argmax of a powers row; the canonical label for a sample.
inline BeamLabel label_from_powers(std::span<const float> powers) {
  return argmax_first(powers);
}

// Checks the per-sample invariants against the dataset meta. Throws
// InvalidArgument naming the first offending sample.
inline void validate_sample(const Sample& s, const DatasetMeta& meta,
                            std::size_t index) {
  auto fail = [index](const std::string& what) {
    throw InvalidArgument("sample " + std::to_string(index) + ": " + what);
  };
  const std::size_t classes = meta.classes();
  if (s.label >= classes) {
    fail("label " + std::to_string(s.label) + " >= " + std::to_string(classes));
  }
  if (s.cloud.size() > kMaxCloudPoints) fail("point cloud too large");
  if (!s.vehicle_pos.finite() || !s.bs_pos.finite()) {
    fail("non-finite position");
  }
  for (const auto& p : s.cloud) {
    if (!p.finite()) fail("non-finite point");
  }
  if (s.powers) {
    if (s.powers->size() != classes) {
      fail("powers has " + std::to_string(s.powers->size()) +
           " entries, expected " + std::to_string(classes));
    }
    for (float v : *s.powers) {
      if (!(v >= 0.0F) || !std::isfinite(v)) fail("powers must be finite >= 0");
    }
    if (label_from_powers(*s.powers) != s.label) {
      fail("label disagrees with argmax(powers)");
    }
  }
}

inline void validate_dataset(const Dataset& ds) {
  if (ds.meta.tx_beams == 0 || ds.meta.rx_beams == 0) {
    throw InvalidArgument("dataset meta: beam counts must be >= 1");
  }
  if (ds.meta.classes() > 65536) {
    throw InvalidArgument("dataset meta: more than 65536 beam pairs");
  }
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    validate_sample(ds.samples[i], ds.meta, i);
  }
}

namespace detail {
inline constexpr char kDatasetMagic[4] = {'F', 'B', 'D', 'S'};
inline constexpr std::uint32_t kDatasetVersion = 1;

inline void put_vec3(ByteWriter& w, const Vec3& v) {
  w.put_f32(v.x);
  w.put_f32(v.y);
  w.put_f32(v.z);
}

inline Vec3 get_vec3(ByteReader& r) {
  Vec3 v;
  v.x = r.get_f32();
  v.y = r.get_f32();
  v.z = r.get_f32();
  return v;
}
}  // namespace detail

inline std::string encode_dataset(const Dataset& ds) {
  validate_dataset(ds);
  ByteWriter w;
  w.put_raw(std::string_view(detail::kDatasetMagic, 4));
  w.put(detail::kDatasetVersion);
  const auto& m = ds.meta;
  w.put(m.tx_beams);
  w.put(m.rx_beams);
  w.put(m.tx_antennas);
  w.put(m.rx_antennas);
  w.put(m.subcarriers);
  w.put_f32(m.area.x_min);
  w.put_f32(m.area.y_min);
  w.put_f32(m.area.x_max);
  w.put_f32(m.area.y_max);
  w.put(m.seed);
  w.put(static_cast<std::uint64_t>(ds.samples.size()));
  for (const auto& s : ds.samples) {
    w.put(static_cast<std::uint32_t>(s.cloud.size()));
    for (const auto& p : s.cloud) detail::put_vec3(w, p);
    detail::put_vec3(w, s.vehicle_pos);
    detail::put_vec3(w, s.bs_pos);
    w.put(static_cast<std::uint16_t>(s.label));
    w.put(static_cast<std::uint8_t>(s.powers ? 1 : 0));
    if (s.powers) w.put_f32s(*s.powers);
  }
  return w.bytes();
}

inline Dataset decode_dataset(std::string_view bytes) {
  ByteReader r(bytes);
  auto magic = r.get_raw(4);
  if (magic != std::string_view(detail::kDatasetMagic, 4)) {
    throw FormatError("bad dataset magic", 0);
  }
  const auto version_at = r.offset();
  if (auto v = r.get<std::uint32_t>(); v != detail::kDatasetVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(v),
                      version_at);
  }
  Dataset ds;
  auto& m = ds.meta;
  m.tx_beams = r.get<std::uint16_t>();
  m.rx_beams = r.get<std::uint16_t>();
  m.tx_antennas = r.get<std::uint16_t>();
  m.rx_antennas = r.get<std::uint16_t>();
  m.subcarriers = r.get<std::uint16_t>();
  m.area.x_min = r.get_f32();
  m.area.y_min = r.get_f32();
  m.area.x_max = r.get_f32();
  m.area.y_max = r.get_f32();
  m.seed = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  if (m.tx_beams == 0 || m.rx_beams == 0) {
    throw FormatError("dataset header declares zero beams", 4);
  }
  const std::size_t classes = m.classes();
  // Reserve only what the payload could possibly hold.
  ds.samples.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(count, r.remaining() / 31 + 1)));
  for (std::uint64_t i = 0; i < count; ++i) {
    try {
      Sample s;
      const auto points_at = r.offset();
      const auto n_points = r.get<std::uint32_t>();
      if (n_points > kMaxCloudPoints) {
        throw FormatError("point count " + std::to_string(n_points) +
                              " exceeds limit",
                          points_at);
      }
      s.cloud.resize(n_points);
      for (auto& p : s.cloud) p = detail::get_vec3(r);
      s.vehicle_pos = detail::get_vec3(r);
      s.bs_pos = detail::get_vec3(r);
      s.label = r.get<std::uint16_t>();
      const auto flag_at = r.offset();
      const auto flag = r.get<std::uint8_t>();
      if (flag > 1) throw FormatError("bad powers flag", flag_at);
      if (flag == 1) {
        std::vector<float> powers(classes);
        r.get_f32s(powers);
        s.powers = std::move(powers);
      }
      ds.samples.push_back(std::move(s));
    } catch (const FormatError& e) {
      throw IntegrityError("sample " + std::to_string(i) + " of " +
                           std::to_string(count) + " declared: " + e.what());
    }
  }
  if (!r.at_end()) {
    throw IntegrityError(std::to_string(r.remaining()) +
                         " trailing bytes after " + std::to_string(count) +
                         " declared samples");
  }
  try {
    validate_dataset(ds);
  } catch (const InvalidArgument& e) {
    throw IntegrityError(e.what());
  }
  return ds;
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
  write_file(path, encode_dataset(ds));
}

inline Dataset load_dataset(const std::string& path) {
  return decode_dataset(read_file(path));
}

// Uniform random disjoint split. The first (N mod V) vehicles receive one
// extra sample, so every sample is assigned.
inline Partition partition_uniform(std::size_t n_samples, std::size_t vehicles,
                                   std::uint64_t seed) {
  if (vehicles < 1) throw InvalidArgument("partition: V must be >= 1");
  if (vehicles > n_samples) {
    throw InvalidArgument("partition: V=" + std::to_string(vehicles) +
                          " exceeds dataset size " + std::to_string(n_samples));
  }
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, streams::kPartition));
  std::shuffle(order.begin(), order.end(), rng);

  Partition part;
  part.assignments.resize(vehicles);
  const std::size_t base = n_samples / vehicles;
  const std::size_t extra = n_samples % vehicles;
  std::size_t cursor = 0;
  for (std::size_t v = 0; v < vehicles; ++v) {
    const std::size_t take = base + (v < extra ? 1 : 0);
    part.assignments[v].assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                               order.begin() + static_cast<std::ptrdiff_t>(cursor + take));
    cursor += take;
  }
  return part;
}

inline Partition partition_uniform(const Dataset& ds, std::size_t vehicles,
                                   std::uint64_t seed) {
  return partition_uniform(ds.size(), vehicles, seed);
}

}  // namespace fedbeam
