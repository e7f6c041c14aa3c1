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
#include <stdexcept>
#include <string>
#include <vector>

namespace fedbeam {

// Root of every error raised by the library. Callers that only want to
// report a failure can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed bytes in a serialized artifact. Carries the offending offset.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Structurally valid data whose contents disagree with what it declares
// (counts, shapes, architecture).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during training or an update step.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::vector<std::string> missing)
      : Error(what), missing_(std::move(missing)) {}

  const std::vector<std::string>& missing_fields() const noexcept {
    return missing_;
  }

 private:
  std::vector<std::string> missing_;
};

// Invalid experiment configuration; path is a dotted field path such as
// "federated.vehicles".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace fedbeam
