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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedbeam/error.hpp"

namespace fedbeam::nn {

// Convolution followed implicitly by batch-norm and PReLU.
struct ConvLayer {
  std::size_t in_ch = 1;
  std::size_t out_ch = 1;
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t stride = 1;
  std::size_t padding = 1;

  friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

// Input -> conv blocks -> flatten -> [linear(hidden) + ReLU] -> linear ->
// softmax. hidden == 0 drops the first linear layer (used by test specs).
struct ArchitectureSpec {
  std::size_t in_ch = 1;
  std::size_t in_h = 1;
  std::size_t in_w = 1;
  std::vector<ConvLayer> convs;
  std::size_t hidden = 0;
  std::size_t classes = 1;

  friend bool operator==(const ArchitectureSpec&,
                         const ArchitectureSpec&) = default;
};

struct FeatureShape {
  std::size_t ch, h, w;
  std::size_t size() const noexcept { return ch * h * w; }
};

inline std::size_t conv_out_dim(std::size_t in, std::size_t kernel,
                                std::size_t stride, std::size_t padding) {
  if (in + 2 * padding < kernel) return 0;
  return (in + 2 * padding - kernel) / stride + 1;
}

// Shapes entering each conv plus the final flattened feature map.
// Throws InvalidArgument if the chain is broken.
inline std::vector<FeatureShape> feature_shapes(const ArchitectureSpec& spec) {
  if (spec.in_ch < 1 || spec.in_h < 1 || spec.in_w < 1) {
    throw InvalidArgument("architecture: input dims must be >= 1");
  }
  if (spec.classes < 1) {
    throw InvalidArgument("architecture: classes must be >= 1");
  }
  std::vector<FeatureShape> shapes{{spec.in_ch, spec.in_h, spec.in_w}};
  for (std::size_t l = 0; l < spec.convs.size(); ++l) {
    const auto& c = spec.convs[l];
    const auto& in = shapes.back();
    const std::string where = "architecture: conv[" + std::to_string(l) + "]";
    if (c.in_ch != in.ch) {
      throw InvalidArgument(where + " expects " + std::to_string(c.in_ch) +
                            " input channels, previous layer gives " +
                            std::to_string(in.ch));
    }
    if (c.out_ch < 1 || c.kernel_h < 1 || c.kernel_w < 1) {
      throw InvalidArgument(where + " has a zero dimension");
    }
    if (c.stride != 1 && c.stride != 2) {
      throw InvalidArgument(where + " stride must be 1 or 2");
    }
    const auto oh = conv_out_dim(in.h, c.kernel_h, c.stride, c.padding);
    const auto ow = conv_out_dim(in.w, c.kernel_w, c.stride, c.padding);
    if (oh == 0 || ow == 0) {
      throw InvalidArgument(where + " kernel larger than padded input");
    }
    shapes.push_back({c.out_ch, oh, ow});
  }
  return shapes;
}

inline std::size_t flat_features(const ArchitectureSpec& spec) {
  return feature_shapes(spec).back().size();
}

inline void validate(const ArchitectureSpec& spec) { (void)feature_shapes(spec); }

// The deployed topology: six conv blocks and two linear layers.
inline void validate_full_topology(const ArchitectureSpec& spec) {
  validate(spec);
  if (spec.convs.size() != 6) {
    throw InvalidArgument("architecture: expected 6 conv layers, got " +
                          std::to_string(spec.convs.size()));
  }
  if (spec.hidden < 1) {
    throw InvalidArgument("architecture: expected 2 linear layers");
  }
}

inline std::size_t input_size(const ArchitectureSpec& spec) {
  return spec.in_ch * spec.in_h * spec.in_w;
}

// Six 3x3 conv blocks of 5 channels with strides 1,2,1,2,2,2 and a
// 16-unit hidden layer.
inline ArchitectureSpec default_architecture(std::size_t cells_x,
                                             std::size_t cells_y,
                                             std::size_t classes) {
  ArchitectureSpec spec;
  spec.in_ch = 1;
  spec.in_h = cells_x;
  spec.in_w = cells_y;
  const std::size_t strides[6] = {1, 2, 1, 2, 2, 2};
  std::size_t in = 1;
  for (std::size_t s : strides) {
    spec.convs.push_back({in, 5, 3, 3, s, 1});
    in = 5;
  }
  spec.hidden = 16;
  spec.classes = classes;
  return spec;
}

enum class SegmentKind {
  kConvWeight,
  kConvBias,
  kBnScale,
  kBnShift,
  kPreluSlope,
  kLinearWeight,
  kLinearBias,
};

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::kConvWeight: return "conv_weight";
    case SegmentKind::kConvBias: return "conv_bias";
    case SegmentKind::kBnScale: return "bn_scale";
    case SegmentKind::kBnShift: return "bn_shift";
    case SegmentKind::kPreluSlope: return "prelu_slope";
    case SegmentKind::kLinearWeight: return "linear_weight";
    case SegmentKind::kLinearBias: return "linear_bias";
  }
  return "?";
}

struct Segment {
  SegmentKind kind;
  std::size_t layer;  // conv index, or linear index (0 = hidden, 1 = output)
  std::size_t offset;
  std::size_t size;
};

// Where each trainable tensor lives inside the flat parameter vector.
// Per conv: weight [out][in][kh][kw], bias, BN scale, BN shift, PReLU
// slopes. Then linear weights [out][in] and biases.
struct ParamLayout {
  std::vector<Segment> segments;
  std::size_t total = 0;

  const Segment& find(SegmentKind kind, std::size_t layer) const {
    for (const auto& s : segments) {
      if (s.kind == kind && s.layer == layer) return s;
    }
    throw InvalidArgument(std::string("layout has no ") + to_string(kind) +
                          " for layer " + std::to_string(layer));
  }
};

inline ParamLayout make_layout(const ArchitectureSpec& spec) {
  const auto shapes = feature_shapes(spec);
  ParamLayout layout;
  auto add = [&layout](SegmentKind k, std::size_t layer, std::size_t n) {
    layout.segments.push_back({k, layer, layout.total, n});
    layout.total += n;
  };
  for (std::size_t l = 0; l < spec.convs.size(); ++l) {
    const auto& c = spec.convs[l];
    add(SegmentKind::kConvWeight, l, c.out_ch * c.in_ch * c.kernel_h * c.kernel_w);
    add(SegmentKind::kConvBias, l, c.out_ch);
    add(SegmentKind::kBnScale, l, c.out_ch);
    add(SegmentKind::kBnShift, l, c.out_ch);
    add(SegmentKind::kPreluSlope, l, c.out_ch);
  }
  const std::size_t flat = shapes.back().size();
  std::size_t lin = 0;
  std::size_t in = flat;
  if (spec.hidden > 0) {
    add(SegmentKind::kLinearWeight, lin, spec.hidden * in);
    add(SegmentKind::kLinearBias, lin, spec.hidden);
    in = spec.hidden;
    ++lin;
  }
  add(SegmentKind::kLinearWeight, lin, spec.classes * in);
  add(SegmentKind::kLinearBias, lin, spec.classes);
  return layout;
}

inline std::size_t count_params(const ArchitectureSpec& spec) {
  std::size_t n = 0;
  for (const auto& c : spec.convs) {
    n += c.in_ch * c.out_ch * c.kernel_h * c.kernel_w + c.out_ch;  // conv
    n += 2 * c.out_ch;                                            // BN
    n += c.out_ch;                                                // PReLU
  }
  const std::size_t flat = flat_features(spec);
  if (spec.hidden > 0) {
    n += flat * spec.hidden + spec.hidden;
    n += spec.hidden * spec.classes + spec.classes;
  } else {
    n += flat * spec.classes + spec.classes;
  }
  return n;
}

// Forward-pass FLOPs: 2 per multiply-accumulate, conv and linear only.
inline std::uint64_t count_flops(const ArchitectureSpec& spec) {
  const auto shapes = feature_shapes(spec);
  std::uint64_t macs = 0;
  for (std::size_t l = 0; l < spec.convs.size(); ++l) {
    const auto& c = spec.convs[l];
    const auto& out = shapes[l + 1];
    macs += static_cast<std::uint64_t>(out.h) * out.w * c.out_ch * c.in_ch *
            c.kernel_h * c.kernel_w;
  }
  const std::uint64_t flat = shapes.back().size();
  if (spec.hidden > 0) {
    macs += flat * spec.hidden + std::uint64_t{spec.hidden} * spec.classes;
  } else {
    macs += flat * spec.classes;
  }
  return 2 * macs;
}

inline std::size_t bn_channels(const ArchitectureSpec& spec) {
  std::size_t n = 0;
  for (const auto& c : spec.convs) n += c.out_ch;
  return n;
}

// JSON form:
//   {"input": {"channels": 1, "height": 20, "width": 200},
//    "conv": [{"in": 1, "out": 5, "kernel": [3, 3], "stride": 1,
//              "padding": 1}, ...],
//    "hidden": 16, "classes": 64}
inline nlohmann::json to_json(const ArchitectureSpec& spec) {
  nlohmann::json convs = nlohmann::json::array();
  for (const auto& c : spec.convs) {
    convs.push_back({{"in", c.in_ch},
                     {"out", c.out_ch},
                     {"kernel", {c.kernel_h, c.kernel_w}},
                     {"stride", c.stride},
                     {"padding", c.padding}});
  }
  return {{"input",
           {{"channels", spec.in_ch}, {"height", spec.in_h}, {"width", spec.in_w}}},
          {"conv", convs},
          {"hidden", spec.hidden},
          {"classes", spec.classes}};
}

namespace detail {
inline std::size_t count_field(const nlohmann::json& j, const char* key,
                               const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key, "missing");
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}
}  // namespace detail

namespace detail {
inline ArchitectureSpec parse_architecture(const nlohmann::json& j,
                                           const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  ArchitectureSpec spec;
  if (!j.contains("input") || !j.at("input").is_object()) {
    throw ConfigError(path + ".input", "missing or not an object");
  }
  const auto& in = j.at("input");
  spec.in_ch = detail::count_field(in, "channels", path + ".input");
  spec.in_h = detail::count_field(in, "height", path + ".input");
  spec.in_w = detail::count_field(in, "width", path + ".input");
  if (j.contains("conv")) {
    if (!j.at("conv").is_array()) throw ConfigError(path + ".conv", "expected an array");
    std::size_t l = 0;
    for (const auto& c : j.at("conv")) {
      const std::string p = path + ".conv[" + std::to_string(l++) + "]";
      if (!c.is_object()) throw ConfigError(p, "expected an object");
      ConvLayer layer;
      layer.in_ch = detail::count_field(c, "in", p);
      layer.out_ch = detail::count_field(c, "out", p);
      if (!c.contains("kernel") || !c.at("kernel").is_array() ||
          c.at("kernel").size() != 2) {
        throw ConfigError(p + ".kernel", "expected [kh, kw]");
      }
      layer.kernel_h = c.at("kernel")[0].get<std::size_t>();
      layer.kernel_w = c.at("kernel")[1].get<std::size_t>();
      layer.stride = detail::count_field(c, "stride", p);
      layer.padding = c.contains("padding") ? detail::count_field(c, "padding", p) : 0;
      spec.convs.push_back(layer);
    }
  }
  spec.hidden = j.contains("hidden") ? detail::count_field(j, "hidden", path) : 0;
  spec.classes = detail::count_field(j, "classes", path);
  try {
    validate(spec);
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  return spec;
}
}  // namespace detail

// Parses and validates; errors carry a field path rooted at 'path'.
inline ArchitectureSpec architecture_from_json(
    const nlohmann::json& j, const std::string& path = "architecture") {
  try {
    return detail::parse_architecture(j, path);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

// Human-readable first difference between two specs, empty if equal.
inline std::string describe_mismatch(const ArchitectureSpec& got,
                                     const ArchitectureSpec& want) {
  auto diff = [](const std::string& what, std::size_t a, std::size_t b) {
    return what + ": checkpoint has " + std::to_string(a) + ", expected " +
           std::to_string(b);
  };
  if (got.in_ch != want.in_ch) return diff("input.channels", got.in_ch, want.in_ch);
  if (got.in_h != want.in_h) return diff("input.height", got.in_h, want.in_h);
  if (got.in_w != want.in_w) return diff("input.width", got.in_w, want.in_w);
  if (got.convs.size() != want.convs.size()) {
    return diff("conv layer count", got.convs.size(), want.convs.size());
  }
  for (std::size_t l = 0; l < got.convs.size(); ++l) {
    const auto& a = got.convs[l];
    const auto& b = want.convs[l];
    const std::string p = "conv[" + std::to_string(l) + "]";
    if (a.in_ch != b.in_ch) return diff(p + ".in", a.in_ch, b.in_ch);
    if (a.out_ch != b.out_ch) return diff(p + ".out", a.out_ch, b.out_ch);
    if (a.kernel_h != b.kernel_h) return diff(p + ".kernel_h", a.kernel_h, b.kernel_h);
    if (a.kernel_w != b.kernel_w) return diff(p + ".kernel_w", a.kernel_w, b.kernel_w);
    if (a.stride != b.stride) return diff(p + ".stride", a.stride, b.stride);
    if (a.padding != b.padding) return diff(p + ".padding", a.padding, b.padding);
  }
  if (got.hidden != want.hidden) return diff("hidden", got.hidden, want.hidden);
  if (got.classes != want.classes) return diff("classes", got.classes, want.classes);
  return {};
}

}  // namespace fedbeam::nn
