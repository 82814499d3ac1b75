// Copyright 2026 The fixdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fixdetect/pipeline.hpp"

namespace fixdetect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

using Path = std::filesystem::path;

/// Values given on the command line take precedence over --config.
struct ConfigOverrides {
  std::optional<Path> config_path;
  std::optional<std::string> measure;
  std::optional<double> threshold;
  std::optional<std::uint64_t> min_runs_per_version;
  std::optional<double> alpha;
  std::optional<std::size_t> min_segment;
  std::optional<std::string> test;
  std::optional<std::size_t> stride;
  std::optional<std::string> correction;
  std::optional<std::int64_t> bucket_width;
  std::optional<std::uint64_t> min_runs_per_bucket;
  std::optional<std::string> identity;
  std::optional<double> fixed_mean_ceiling;
  bool lenient = false;

  pipeline::PipelineConfig resolve() const;
};

struct SimulateArgs {
  Path scenario;
  Path out_runs;
  Path out_truth;
  std::optional<Path> out_patch;
  std::optional<std::uint64_t> seed;
  bool lenient = false;
};

struct GroupArgs {
  Path runs;
  Path patch;
  std::optional<Path> out;
  ConfigOverrides config;
};

struct DetectArgs {
  Path series;
  std::optional<Path> out;
  ConfigOverrides config;
};

struct PipelineArgs {
  Path runs;
  Path patch;
  std::optional<Path> out;
  ConfigOverrides config;
};

struct EvalArgs {
  Path pred;
  Path truth;
  std::size_t tolerance = 2;
  std::vector<std::string> candidates;
  std::optional<Path> out;
  bool lenient = false;
};

struct BenchArgs {
  std::size_t n = 100'000;
  std::uint64_t seed = 3;
  std::optional<Path> out;
  ConfigOverrides config;
};

// Each command returns a process exit code: 0 success, 2 malformed input,
// 3 internal invariant violation. Diagnostics go to `err`; when no output
// path is given the JSON result goes to `out`.
int cmd_simulate(const SimulateArgs& args, std::ostream& err);
int cmd_group(const GroupArgs& args, std::ostream& out, std::ostream& err);
int cmd_detect(const DetectArgs& args, std::ostream& out, std::ostream& err);
int cmd_pipeline(const PipelineArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; usage errors exit with 1.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fixdetect::cli
