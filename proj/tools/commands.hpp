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

#include <cstdint>
#include <optional>
#include <string>

#include "courtaug/coco_io.hpp"

namespace courtaug::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSeedEnv = "COURTAUG_SEED";

enum ExitCode : int { kOk = 0, kInputError = 2, kIoError = 3 };

struct SynthOptions {
  int images = 10;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int width = 1920;
  int height = 1440;
  int persons = 4;
  int balls = 1;
  double occlusion = 0.0;
};

struct ExtractOptions {
  std::string dataset_path;
  std::string images_dir;
  std::string out_dir;
};

struct AugmentOptions {
  std::string dataset_path;
  std::string images_dir;
  std::string bank_dir;
  std::string config_path;  // empty: built-in defaults
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> duplication_factor;
  int jobs = 1;
};

struct CropOptions {
  std::string images_dir;
  std::string fraction = "1/5";
  std::string out_dir;
  std::string dataset_path;  // optional; supplies image ids
};

struct UncropOptions {
  std::string results_path;
  std::string transforms_path;
  std::string out_path;
};

struct FilterCliOptions {
  std::string results_path;
  std::int64_t ball_category = 2;
  double min_dim = 10.0;
  double max_dim = 40.0;
  std::string gate_mode = "both";
  std::string gate_order = "before";
  std::string out_path;
};

struct EvalOptions {
  std::string gt_path;
  std::string results_path;
  std::string out_path;  // optional JSON report
};

// Each command throws courtaug::Error on failure and writes a run manifest
// next to its outputs on success.
void cmd_synth(const SynthOptions& options);
void cmd_extract_bank(const ExtractOptions& options);
void cmd_augment(const AugmentOptions& options);
void cmd_crop(const CropOptions& options);
void cmd_uncrop(const UncropOptions& options);
void cmd_filter(const FilterCliOptions& options);
// Returns the printed report.
std::string cmd_eval(const EvalOptions& options);

// Accepts "a/b" or a decimal.
double parse_fraction(const std::string& text);

// Full command line entry point: returns the process exit code and reports
// errors on stderr as one JSON line.
int run(int argc, char** argv);

}  // namespace courtaug::cli
