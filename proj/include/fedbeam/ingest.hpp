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
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedbeam/binary_io.hpp"
#include "fedbeam/dataset.hpp"
#include "fedbeam/error.hpp"

namespace fedbeam {

// Exchange layout: one set of files per sample, named by patterns in which
// "{index}" is replaced with the sample index. Arrays are raw little-endian
// float32; labels are decimal text.
//
//   {"meta": {"tx_beams": 16, "rx_beams": 4, "tx_antennas": 16,
//             "rx_antennas": 4, "subcarriers": 8,
//             "area": [x_min, y_min, x_max, y_max], "seed": 0},
//    "count": 100,                               (optional; else scan)
//    "files": {"points":  "s{index}/points.f32",  (x,y,z triples)
//              "vehicle": "s{index}/vehicle.f32", (x,y,z)
//              "bs":      "s{index}/bs.f32",      (x,y,z)
//              "powers":  "s{index}/powers.f32",  (optional, C_t*C_r)
//              "label":   "s{index}/label.txt"}}  (optional)
struct IngestSpec {
  DatasetMeta meta;
  std::optional<std::size_t> count;
  std::string points;
  std::string vehicle;
  std::string bs;
  std::optional<std::string> powers;
  std::optional<std::string> label;
};

struct IngestResult {
  Dataset dataset;
  std::size_t skipped = 0;
  std::vector<std::string> notes;
};

inline IngestSpec ingest_spec_from_json(const nlohmann::json& j) {
  std::vector<std::string> missing;
  auto need = [&missing](const nlohmann::json& obj, const char* key,
                         const std::string& path) -> const nlohmann::json* {
    if (!obj.is_object() || !obj.contains(key)) {
      missing.push_back(path + key);
      return nullptr;
    }
    return &obj.at(key);
  };
  IngestSpec spec;
  const nlohmann::json empty = nlohmann::json::object();
  const auto* meta = need(j, "meta", "");
  const auto* files = need(j, "files", "");
  const auto& m = meta ? *meta : empty;
  const auto& f = files ? *files : empty;
  const auto* tx = need(m, "tx_beams", "meta.");
  const auto* rx = need(m, "rx_beams", "meta.");
  const auto* nt = need(m, "tx_antennas", "meta.");
  const auto* nr = need(m, "rx_antennas", "meta.");
  const auto* nc = need(m, "subcarriers", "meta.");
  const auto* area = need(m, "area", "meta.");
  const auto* points = need(f, "points", "files.");
  const auto* vehicle = need(f, "vehicle", "files.");
  const auto* bs = need(f, "bs", "files.");
  if (!missing.empty()) {
    std::string list;
    for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
    throw IngestError("ingest spec is missing required fields: " + list,
                      missing);
  }
  try {
    spec.meta.tx_beams = tx->get<std::uint16_t>();
    spec.meta.rx_beams = rx->get<std::uint16_t>();
    spec.meta.tx_antennas = nt->get<std::uint16_t>();
    spec.meta.rx_antennas = nr->get<std::uint16_t>();
    spec.meta.subcarriers = nc->get<std::uint16_t>();
    const auto box = area->get<std::vector<float>>();
    if (box.size() != 4) throw IngestError("meta.area must have 4 numbers", {});
    spec.meta.area = {box[0], box[1], box[2], box[3]};
    spec.meta.seed = m.value("seed", std::uint64_t{0});
    if (j.contains("count")) spec.count = j.at("count").get<std::size_t>();
    spec.points = points->get<std::string>();
    spec.vehicle = vehicle->get<std::string>();
    spec.bs = bs->get<std::string>();
    if (f.contains("powers")) spec.powers = f.at("powers").get<std::string>();
    if (f.contains("label")) spec.label = f.at("label").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("ingest spec has a malformed field: ") + e.what(), {});
  }
  if (spec.meta.tx_beams == 0 || spec.meta.rx_beams == 0) {
    throw IngestError("ingest spec declares zero beams", {});
  }
  return spec;
}

inline nlohmann::json ingest_spec_to_json(const IngestSpec& s) {
  nlohmann::json files = {{"points", s.points}, {"vehicle", s.vehicle}, {"bs", s.bs}};
  if (s.powers) files["powers"] = *s.powers;
  if (s.label) files["label"] = *s.label;
  nlohmann::json j = {
      {"meta",
       {{"tx_beams", s.meta.tx_beams},
        {"rx_beams", s.meta.rx_beams},
        {"tx_antennas", s.meta.tx_antennas},
        {"rx_antennas", s.meta.rx_antennas},
        {"subcarriers", s.meta.subcarriers},
        {"area", {s.meta.area.x_min, s.meta.area.y_min, s.meta.area.x_max,
                  s.meta.area.y_max}},
        {"seed", s.meta.seed}}},
      {"files", files}};
  if (s.count) j["count"] = *s.count;
  return j;
}

namespace detail {
inline std::string expand_pattern(std::string pattern, std::size_t index) {
  static constexpr std::string_view kToken = "{index}";
  for (auto pos = pattern.find(kToken); pos != std::string::npos;
       pos = pattern.find(kToken, pos)) {
    const auto value = std::to_string(index);
    pattern.replace(pos, kToken.size(), value);
    pos += value.size();
  }
  return pattern;
}

inline std::vector<float> read_f32_file(const std::filesystem::path& p) {
  const auto bytes = read_file(p.string());
  if (bytes.size() % 4 != 0) {
    throw FormatError("float32 file size not a multiple of 4: " + p.string(),
                      bytes.size());
  }
  std::vector<float> out(bytes.size() / 4);
  ByteReader r(bytes);
  r.get_f32s(out);
  return out;
}

inline void write_f32_file(const std::filesystem::path& p,
                           std::span<const float> values) {
  ByteWriter w;
  w.put_f32s(values);
  write_file(p.string(), w.bytes());
}
}  // namespace detail

// Reads an exchange directory into a canonical Dataset. Samples with
// neither powers nor a label, or with malformed arrays, are skipped and
// counted. Missing required arrays abort the ingestion.
inline IngestResult ingest_external(const std::filesystem::path& dir,
                                    const IngestSpec& spec) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw IngestError("ingest directory does not exist: " + dir.string(), {});
  }
  IngestResult result;
  result.dataset.meta = spec.meta;
  const std::size_t classes = spec.meta.classes();
  auto path_for = [&dir](const std::string& pattern, std::size_t i) {
    return dir / detail::expand_pattern(pattern, i);
  };
  for (std::size_t i = 0;; ++i) {
    if (spec.count) {
      if (i >= *spec.count) break;
    } else if (!fs::exists(path_for(spec.points, i))) {
      break;
    }
    std::vector<std::string> absent;
    for (const auto& [name, pattern] :
         {std::pair<const char*, const std::string*>{"points", &spec.points},
          {"vehicle", &spec.vehicle},
          {"bs", &spec.bs}}) {
      if (!fs::exists(path_for(*pattern, i))) absent.push_back(name);
    }
    if (!absent.empty()) {
      std::string list;
      for (const auto& a : absent) list += (list.empty() ? "" : ", ") + a;
      throw IngestError("sample " + std::to_string(i) +
                            " is missing required arrays: " + list,
                        absent);
    }
    const bool has_powers = spec.powers && fs::exists(path_for(*spec.powers, i));
    const bool has_label = spec.label && fs::exists(path_for(*spec.label, i));
    if (!has_powers && !has_label) {
      ++result.skipped;
      result.notes.push_back("sample " + std::to_string(i) +
                             ": no powers and no label, skipped");
      continue;
    }
    try {
      Sample s;
      const auto pts = detail::read_f32_file(path_for(spec.points, i));
      if (pts.size() % 3 != 0) throw InvalidArgument("points not xyz triples");
      for (std::size_t k = 0; k < pts.size(); k += 3) {
        s.cloud.push_back({pts[k], pts[k + 1], pts[k + 2]});
      }
      const auto veh = detail::read_f32_file(path_for(spec.vehicle, i));
      const auto bs = detail::read_f32_file(path_for(spec.bs, i));
      if (veh.size() != 3 || bs.size() != 3) {
        throw InvalidArgument("positions must hold 3 floats");
      }
      s.vehicle_pos = {veh[0], veh[1], veh[2]};
      s.bs_pos = {bs[0], bs[1], bs[2]};
      if (has_powers) {
        auto powers = detail::read_f32_file(path_for(*spec.powers, i));
        if (powers.size() != classes) {
          throw InvalidArgument("powers has " + std::to_string(powers.size()) +
                                " entries, expected " + std::to_string(classes));
        }
        s.label = label_from_powers(powers);
        s.powers = std::move(powers);
      } else {
        std::ifstream in(path_for(*spec.label, i));
        long long label = -1;
        if (!(in >> label) || label < 0 ||
            static_cast<std::size_t>(label) >= classes) {
          throw InvalidArgument("label file unreadable or out of range");
        }
        s.label = static_cast<BeamLabel>(label);
      }
      validate_sample(s, spec.meta, result.dataset.size());
      result.dataset.samples.push_back(std::move(s));
    } catch (const Error& e) {
      ++result.skipped;
      result.notes.push_back("sample " + std::to_string(i) + ": " + e.what() +
                             ", skipped");
    }
  }
  return result;
}

inline IngestResult ingest_external(const std::filesystem::path& dir,
                                    const std::filesystem::path& spec_file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(spec_file.string()));
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("ingest spec is not valid JSON: " + std::string(e.what()), {});
  }
  return ingest_external(dir, ingest_spec_from_json(j));
}

// Writes ds into the exchange layout under dir (created if needed) together
// with a matching ingest.json, and returns the spec used.
inline IngestSpec export_exchange(const Dataset& ds,
                                  const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  validate_dataset(ds);
  IngestSpec spec;
  spec.meta = ds.meta;
  spec.count = ds.size();
  spec.points = "sample_{index}/points.f32";
  spec.vehicle = "sample_{index}/vehicle.f32";
  spec.bs = "sample_{index}/bs.f32";
  spec.powers = "sample_{index}/powers.f32";
  spec.label = "sample_{index}/label.txt";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds.samples[i];
    fs::create_directories(dir / ("sample_" + std::to_string(i)));
    std::vector<float> pts;
    pts.reserve(s.cloud.size() * 3);
    for (const auto& p : s.cloud) pts.insert(pts.end(), {p.x, p.y, p.z});
    detail::write_f32_file(dir / detail::expand_pattern(spec.points, i), pts);
    const float veh[3] = {s.vehicle_pos.x, s.vehicle_pos.y, s.vehicle_pos.z};
    const float bs[3] = {s.bs_pos.x, s.bs_pos.y, s.bs_pos.z};
    detail::write_f32_file(dir / detail::expand_pattern(spec.vehicle, i), veh);
    detail::write_f32_file(dir / detail::expand_pattern(spec.bs, i), bs);
    if (s.powers) {
      detail::write_f32_file(dir / detail::expand_pattern(*spec.powers, i),
                             *s.powers);
    }
    std::ofstream(dir / detail::expand_pattern(*spec.label, i)) << s.label << '\n';
  }
  fs::create_directories(dir);
  std::ofstream(dir / "ingest.json") << ingest_spec_to_json(spec).dump(2) << '\n';
  return spec;
}

}  // namespace fedbeam
