// Copyright 2026 The CourtAug Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace courtaug {

enum class ErrorKind {
  MalformedDocument,
  BrokenReference,
  GeometryError,
  IdOverflow,
  InvalidArgument,
  DegeneratePolygon,
  LengthMismatch,
  DimensionMismatch,
  EmptyAfterClip,
  SamplingExhausted,
  EmptyBank,
  ImageLoadFailure,
  ManifestMissing,
  CorruptEntry,
  IoFailure,
  ConfigError,
  ValidationFailed,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the toolkit; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // True for failures caused by the filesystem rather than by input content.
  bool is_io() const noexcept {
    return kind_ == ErrorKind::IoFailure || kind_ == ErrorKind::ImageLoadFailure ||
           kind_ == ErrorKind::ManifestMissing || kind_ == ErrorKind::CorruptEntry;
  }

 private:
  ErrorKind kind_;
};

}  // namespace courtaug
