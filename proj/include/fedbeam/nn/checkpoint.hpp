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

#include "fedbeam/binary_io.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/nn/network.hpp"

namespace fedbeam::nn {

// Layout: "FBNN", u32 version, u32 spec-JSON length, spec JSON, u64 param
// count, float32 params, u64 BN channel count, float32 running means,
// float32 running variances. Little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline std::string encode_checkpoint(const ModelState& model) {
  if (model.params.size() != count_params(model.spec)) {
    throw IntegrityError("checkpoint: parameter vector length " +
                         std::to_string(model.params.size()) +
                         " does not match spec (" +
                         std::to_string(count_params(model.spec)) + ")");
  }
  const std::string spec_json = to_json(model.spec).dump();
  ByteWriter w;
  w.put_raw("FBNN");
  w.put(kCheckpointVersion);
  w.put(static_cast<std::uint32_t>(spec_json.size()));
  w.put_raw(spec_json);
  w.put(static_cast<std::uint64_t>(model.params.size()));
  w.put_f32s(model.params);
  w.put(static_cast<std::uint64_t>(model.bn.mean.size()));
  w.put_f32s(model.bn.mean);
  w.put_f32s(model.bn.var);
  return w.bytes();
}

inline ModelState decode_checkpoint(std::string_view bytes) {
  ModelState model;
  try {
    ByteReader r(bytes);
    if (r.get_raw(4) != "FBNN") throw FormatError("bad checkpoint magic", 0);
    const auto version_at = r.offset();
    if (r.get<std::uint32_t>() != kCheckpointVersion) {
      throw FormatError("unsupported checkpoint version", version_at);
    }
    const auto json_len = r.get<std::uint32_t>();
    const auto json_at = r.offset();
    const auto json_text = r.get_raw(json_len);
    nlohmann::json spec_json;
    try {
      spec_json = nlohmann::json::parse(json_text);
      model.spec = architecture_from_json(spec_json, "checkpoint.spec");
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad spec JSON: ") + e.what(), json_at);
    } catch (const ConfigError& e) {
      throw IntegrityError(std::string("checkpoint spec invalid: ") + e.what());
    }
    const auto n_params = r.get<std::uint64_t>();
    const auto expected = count_params(model.spec);
    if (n_params != expected) {
      throw IntegrityError("checkpoint declares " + std::to_string(n_params) +
                           " parameters but its spec needs " +
                           std::to_string(expected));
    }
    if (r.remaining() / 4 < n_params) {
      throw IntegrityError("checkpoint truncated inside the parameter block");
    }
    model.params.resize(n_params);
    r.get_f32s(model.params);
    const auto n_bn = r.get<std::uint64_t>();
    if (n_bn != bn_channels(model.spec)) {
      throw IntegrityError("checkpoint declares " + std::to_string(n_bn) +
                           " batch-norm channels but its spec has " +
                           std::to_string(bn_channels(model.spec)));
    }
    if (r.remaining() / 8 < n_bn) {
      throw IntegrityError("checkpoint truncated inside the batch-norm block");
    }
    model.bn = fresh_batch_norm<float>(model.spec);
    r.get_f32s(model.bn.mean);
    r.get_f32s(model.bn.var);
    if (!r.at_end()) {
      throw IntegrityError("checkpoint has " + std::to_string(r.remaining()) +
                           " trailing bytes");
    }
  } catch (const FormatError& e) {
    throw IntegrityError(std::string("checkpoint unreadable: ") + e.what());
  }
  return model;
}

inline void save_checkpoint(const ModelState& model, const std::string& path) {
  write_file(path, encode_checkpoint(model));
}

inline ModelState load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file(path));
}

// Loads and insists the stored architecture equals 'expected'.
inline ModelState load_checkpoint(const std::string& path,
                                  const ArchitectureSpec& expected) {
  auto model = load_checkpoint(path);
  if (auto diff = describe_mismatch(model.spec, expected); !diff.empty()) {
    throw IntegrityError("checkpoint architecture mismatch at " + diff);
  }
  return model;
}

}  // namespace fedbeam::nn
