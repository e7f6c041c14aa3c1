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

#include <gtest/gtest.h>

#include "fedbeam/nn/architecture.hpp"

namespace fedbeam::nn {
namespace {

ArchitectureSpec single_linear() {
  ArchitectureSpec s;
  s.in_w = 10;
  s.classes = 5;
  return s;
}

ArchitectureSpec one_conv() {
  ArchitectureSpec s;
  s.in_h = 4;
  s.in_w = 4;
  s.convs.push_back({1, 2, 3, 3, 1, 1});
  s.classes = 1;
  return s;
}

// Oracle: walk every output position and kernel tap that lands inside the
// padded input and count one multiply-accumulate per tap per channel pair.
std::uint64_t brute_force_flops(const ArchitectureSpec& s) {
  std::uint64_t macs = 0;
  std::size_t ch = s.in_ch, h = s.in_h, w = s.in_w;
  for (const auto& c : s.convs) {
    const long ph = static_cast<long>(h + 2 * c.padding);
    const long pw = static_cast<long>(w + 2 * c.padding);
    std::size_t oh = 0, ow = 0;
    for (long y = 0; y + static_cast<long>(c.kernel_h) <= ph; y += c.stride) ++oh;
    for (long x = 0; x + static_cast<long>(c.kernel_w) <= pw; x += c.stride) ++ow;
    for (std::size_t o = 0; o < oh * ow; ++o) {
      for (std::size_t k = 0; k < c.kernel_h * c.kernel_w; ++k) {
        macs += ch * c.out_ch;
      }
    }
    ch = c.out_ch;
    h = oh;
    w = ow;
  }
  std::size_t flat = ch * h * w;
  if (s.hidden > 0) {
    macs += flat * s.hidden;
    flat = s.hidden;
  }
  macs += flat * s.classes;
  return 2 * macs;
}

TEST(Counts, SingleLinearLayer) {
  EXPECT_EQ(count_params(single_linear()), 55u);
  EXPECT_EQ(count_flops(single_linear()), 100u);
}

TEST(Counts, OneConvBlock) {
  // conv 18 + 2, BN 4, PReLU 2, then a 32 -> 1 linear layer.
  EXPECT_EQ(count_params(one_conv()), 26u + 33u);
  EXPECT_EQ(count_flops(one_conv()), 576u + 64u);
}

TEST(Counts, DefaultArchitecture) {
  EXPECT_EQ(count_params(default_architecture(20, 200, 64)), 4474u);
  EXPECT_EQ(count_params(default_architecture(20, 200, 256)), 7738u);
  EXPECT_EQ(flat_features(default_architecture(20, 200, 64)), 130u);
}

TEST(Counts, FlopsMatchBruteForce) {
  for (const auto& s : {single_linear(), one_conv(), default_architecture(20, 200, 64),
                        default_architecture(7, 31, 10)}) {
    EXPECT_EQ(count_flops(s), brute_force_flops(s));
  }
  ArchitectureSpec odd;
  odd.in_ch = 2;
  odd.in_h = 9;
  odd.in_w = 6;
  odd.convs = {{2, 3, 2, 5, 2, 0}, {3, 4, 3, 1, 1, 2}};
  odd.hidden = 7;
  odd.classes = 3;
  EXPECT_EQ(count_flops(odd), brute_force_flops(odd));
}

TEST(Counts, LayoutCoversEveryParameter) {
  for (const auto& s : {single_linear(), one_conv(), default_architecture(20, 200, 256)}) {
    const auto layout = make_layout(s);
    EXPECT_EQ(layout.total, count_params(s));
    std::size_t next = 0;
    for (const auto& seg : layout.segments) {
      EXPECT_EQ(seg.offset, next);
      next += seg.size;
    }
    EXPECT_EQ(next, layout.total);
  }
  EXPECT_THROW(make_layout(single_linear()).find(SegmentKind::kConvWeight, 0),
               InvalidArgument);
}

TEST(Shapes, StridedChain) {
  const auto shapes = feature_shapes(default_architecture(20, 200, 64));
  ASSERT_EQ(shapes.size(), 7u);
  EXPECT_EQ(shapes[2].h, 10u);
  EXPECT_EQ(shapes[2].w, 100u);
  EXPECT_EQ(shapes[6].h, 2u);
  EXPECT_EQ(shapes[6].w, 13u);
}

TEST(Shapes, BrokenChainsRejected) {
  auto s = one_conv();
  s.convs[0].in_ch = 3;
  EXPECT_THROW(validate(s), InvalidArgument);
  s = one_conv();
  s.convs[0].stride = 3;
  EXPECT_THROW(validate(s), InvalidArgument);
  s = one_conv();
  s.convs[0].kernel_h = 9;
  EXPECT_THROW(validate(s), InvalidArgument);
  EXPECT_THROW(validate_full_topology(one_conv()), InvalidArgument);
  EXPECT_NO_THROW(validate_full_topology(default_architecture(20, 200, 64)));
}

TEST(Json, RoundTrip) {
  for (const auto& s : {single_linear(), one_conv(), default_architecture(20, 200, 64)}) {
    EXPECT_EQ(architecture_from_json(to_json(s)), s);
  }
}

TEST(Json, ErrorsCarryFieldPath) {
  auto j = to_json(default_architecture(20, 200, 64));
  j["conv"][1].erase("stride");
  try {
    architecture_from_json(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "architecture.conv[1].stride");
  }
  j = to_json(default_architecture(20, 200, 64));
  j["conv"][2]["in"] = 4;
  EXPECT_THROW(architecture_from_json(j), ConfigError);
  j = to_json(default_architecture(20, 200, 64));
  j["classes"] = -3;
  EXPECT_THROW(architecture_from_json(j), ConfigError);
  j["classes"] = "many";
  EXPECT_THROW(architecture_from_json(j), ConfigError);
  j = to_json(default_architecture(20, 200, 64));
  j["conv"][0]["kernel"] = {3, "x"};
  EXPECT_THROW(architecture_from_json(j), ConfigError);
}

TEST(Mismatch, NamesFirstDifference) {
  const auto a = default_architecture(20, 200, 64);
  auto b = a;
  EXPECT_TRUE(describe_mismatch(a, b).empty());
  b.convs[2].out_ch = 7;
  b.classes = 3;
  EXPECT_EQ(describe_mismatch(b, a).rfind("conv[2].out", 0), 0u);
}

}  // namespace
}  // namespace fedbeam::nn
