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

#include <filesystem>

#include <gtest/gtest.h>

#include "fedbeam/nn/checkpoint.hpp"

namespace fedbeam::nn {
namespace {

ModelState trained_like(std::uint64_t seed) {
  auto m = init_params(default_architecture(20, 200, 64), seed);
  for (std::size_t k = 0; k < m.bn.mean.size(); ++k) {
    m.bn.mean[k] = 0.1F * static_cast<float>(k);
    m.bn.var[k] = 1.0F + 0.01F * static_cast<float>(k);
  }
  return m;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const auto m = trained_like(5);
  const auto bytes = encode_checkpoint(m);
  const auto back = decode_checkpoint(bytes);
  EXPECT_EQ(back, m);
  EXPECT_EQ(encode_checkpoint(back), bytes);
}

TEST(Checkpoint, EveryTruncationIsAnIntegrityError) {
  const auto bytes = encode_checkpoint(trained_like(6));
  for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{10}, std::size_t{40},
                          bytes.size() / 2, bytes.size() - 5, bytes.size() - 1}) {
    EXPECT_THROW(decode_checkpoint(std::string_view(bytes).substr(0, len)), IntegrityError)
        << len;
  }
  EXPECT_THROW(decode_checkpoint(bytes + "x"), IntegrityError);
}

TEST(Checkpoint, CorruptHeaderRejected) {
  auto bytes = encode_checkpoint(trained_like(7));
  bytes[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bytes), IntegrityError);
  bytes = encode_checkpoint(trained_like(7));
  bytes[12] = '!';  // first byte of the spec JSON
  EXPECT_THROW(decode_checkpoint(bytes), IntegrityError);
}

TEST(Checkpoint, WrongLengthModelRefusedOnSave) {
  auto m = trained_like(8);
  m.params.pop_back();
  EXPECT_THROW(encode_checkpoint(m), IntegrityError);
}

TEST(Checkpoint, SpecMismatchNamesTheField) {
  const auto path = (std::filesystem::temp_directory_path() / "fedbeam_ckpt.fbnn").string();
  save_checkpoint(trained_like(9), path);
  auto other = default_architecture(20, 200, 64);
  other.convs[2].out_ch = 6;
  other.convs[3].in_ch = 6;
  try {
    load_checkpoint(path, other);
    FAIL();
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("conv[2].out"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(load_checkpoint(path, default_architecture(20, 200, 64)));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fedbeam::nn
