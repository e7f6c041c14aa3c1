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

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "fedbeam/dataset.hpp"

namespace fedbeam {
namespace {

constexpr std::size_t kHeaderBytes = 50;

DatasetMeta small_meta() {
  DatasetMeta m;
  m.tx_beams = 4;
  m.rx_beams = 2;
  m.tx_antennas = 4;
  m.rx_antennas = 2;
  m.subcarriers = 3;
  m.area = {0.0F, 0.0F, 10.0F, 100.0F};
  m.seed = 42;
  return m;
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, bool with_powers) {
  std::uniform_real_distribution<float> u(-50.0F, 50.0F);
  std::exponential_distribution<float> e(1.0F);
  Dataset ds;
  ds.meta = small_meta();
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.cloud.resize(rng() % 7);
    for (auto& p : s.cloud) p = {u(rng), u(rng), u(rng)};
    s.vehicle_pos = {u(rng), u(rng), u(rng)};
    s.bs_pos = {u(rng), u(rng), u(rng)};
    if (with_powers && (rng() % 3 != 0)) {
      std::vector<float> y(ds.meta.classes());
      for (auto& v : y) v = e(rng);
      s.label = label_from_powers(y);
      s.powers = std::move(y);
    } else {
      s.label = static_cast<BeamLabel>(rng() % ds.meta.classes());
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

std::size_t record_bytes(const Sample& s) {
  return 4 + 12 * s.cloud.size() + 24 + 2 + 1 + (s.powers ? 4 * s.powers->size() : 0);
}

TEST(DatasetCodec, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ds = random_dataset(rng, rng() % 12, trial % 2 == 0);
    const auto bytes = encode_dataset(ds);
    const auto back = decode_dataset(bytes);
    EXPECT_EQ(back, ds);
    EXPECT_EQ(encode_dataset(back), bytes);
  }
}

TEST(DatasetCodec, EmptyDatasetIsValidFile) {
  Dataset ds;
  ds.meta = small_meta();
  const auto bytes = encode_dataset(ds);
  EXPECT_EQ(bytes.size(), kHeaderBytes);
  const auto back = decode_dataset(bytes);
  EXPECT_TRUE(back.empty());
  EXPECT_EQ(back.meta, ds.meta);
}

TEST(DatasetCodec, TruncationNamesTheSample) {
  std::mt19937_64 rng(2);
  const auto ds = random_dataset(rng, 5, true);
  const auto bytes = encode_dataset(ds);
  std::size_t offset = kHeaderBytes;
  for (int i = 0; i < 3; ++i) offset += record_bytes(ds.samples[i]);
  const auto cut = bytes.substr(0, offset + 10);
  try {
    decode_dataset(cut);
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("sample 3 of 5 declared"), std::string::npos)
        << e.what();
  }
}

TEST(DatasetCodec, TruncatedHeaderIsFormatError) {
  std::mt19937_64 rng(3);
  const auto bytes = encode_dataset(random_dataset(rng, 2, false));
  EXPECT_THROW(decode_dataset(bytes.substr(0, 20)), FormatError);
}

TEST(DatasetCodec, TrailingBytesRejected) {
  std::mt19937_64 rng(4);
  auto bytes = encode_dataset(random_dataset(rng, 2, false));
  bytes.push_back('\0');
  EXPECT_THROW(decode_dataset(bytes), IntegrityError);
}

TEST(DatasetCodec, BadMagicAndVersion) {
  std::mt19937_64 rng(5);
  auto bytes = encode_dataset(random_dataset(rng, 1, false));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_dataset(bad), FormatError);
  bad = bytes;
  bad[4] = 9;
  EXPECT_THROW(decode_dataset(bad), FormatError);
}

TEST(DatasetCodec, LabelOutOfRangeOnDiskRejected) {
  std::mt19937_64 rng(6);
  auto ds = random_dataset(rng, 1, false);
  ds.samples[0].cloud.clear();
  auto bytes = encode_dataset(ds);
  // label sits after point count and two positions.
  const std::size_t at = kHeaderBytes + 4 + 24;
  bytes[at] = 8;  // classes == 8
  bytes[at + 1] = 0;
  EXPECT_THROW(decode_dataset(bytes), IntegrityError);
}

TEST(DatasetValidate, LabelMustMatchPowers) {
  std::mt19937_64 rng(7);
  auto ds = random_dataset(rng, 1, false);
  ds.samples[0].powers = std::vector<float>{0, 0, 5, 0, 0, 0, 0, 0};
  ds.samples[0].label = 1;
  EXPECT_THROW(validate_dataset(ds), InvalidArgument);
  ds.samples[0].label = 2;
  EXPECT_NO_THROW(validate_dataset(ds));
  ds.samples[0].powers->pop_back();
  EXPECT_THROW(validate_dataset(ds), InvalidArgument);
}

TEST(DatasetFile, SaveLoad) {
  std::mt19937_64 rng(8);
  const auto ds = random_dataset(rng, 4, true);
  const auto path = (std::filesystem::temp_directory_path() / "fedbeam_ds_test.fbds").string();
  save_dataset(ds, path);
  EXPECT_EQ(load_dataset(path), ds);
  std::filesystem::remove(path);
  EXPECT_THROW(load_dataset(path), Error);
}

void expect_disjoint_cover(const Partition& p, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& a : p.assignments) {
    for (auto i : a) {
      ASSERT_LT(i, n);
      ++seen[i];
    }
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST(Partition, EqualSplit) {
  const auto p = partition_uniform(11000, 5, 1);
  ASSERT_EQ(p.vehicles(), 5u);
  for (const auto& a : p.assignments) EXPECT_EQ(a.size(), 2200u);
  expect_disjoint_cover(p, 11000);
}

TEST(Partition, RemainderGoesToFirstVehicles) {
  const auto p = partition_uniform(10, 3, 1);
  ASSERT_EQ(p.vehicles(), 3u);
  EXPECT_EQ(p.assignments[0].size(), 4u);
  EXPECT_EQ(p.assignments[1].size(), 3u);
  EXPECT_EQ(p.assignments[2].size(), 3u);
  expect_disjoint_cover(p, 10);
}

TEST(Partition, SizesDifferByAtMostOneForAnyShape) {
  for (std::size_t n = 1; n < 40; n += 3) {
    for (std::size_t v = 1; v <= n; v += 2) {
      const auto p = partition_uniform(n, v, n * 31 + v);
      std::size_t lo = n;
      std::size_t hi = 0;
      for (const auto& a : p.assignments) {
        lo = std::min(lo, a.size());
        hi = std::max(hi, a.size());
      }
      EXPECT_LE(hi - lo, 1u);
      expect_disjoint_cover(p, n);
    }
  }
}

TEST(Partition, DeterministicPerSeed) {
  EXPECT_EQ(partition_uniform(100, 4, 9).assignments, partition_uniform(100, 4, 9).assignments);
  EXPECT_NE(partition_uniform(100, 4, 9).assignments, partition_uniform(100, 4, 10).assignments);
}

TEST(Partition, InvalidVehicleCounts) {
  EXPECT_THROW(partition_uniform(10, 0, 1), InvalidArgument);
  EXPECT_THROW(partition_uniform(3, 4, 1), InvalidArgument);
}

}  // namespace
}  // namespace fedbeam
