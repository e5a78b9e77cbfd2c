// Copyright 2026 The apselect Authors.
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

// Scenario runner behind the apselect command line tool.

#ifndef AP_CLI_HPP
#define AP_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ap/io.hpp"

namespace ap::cli {

using io::json;

enum ExitCode : int { kOk = 0, kCertificateFailure = 1, kSchemaViolation = 2, kStageFailure = 3 };

struct RunConfig {
  std::string scenario;
  MetricSpaceCfg space;
  AveragingScheme scheme;
  json inputs;
  std::uint64_t seed = 0;
  BasisPtr basis;
};

/// Throws io::SchemaError.
RunConfig parse_config(const json& j);

struct OutputFile {
  std::string name;
  std::string contents;
};

struct RunOutput {
  int exit_code = kOk;
  std::string message;  // failed certificate or stage, empty on success
  json report;
  std::vector<OutputFile> files;  // report.json first
};

/// Runs a scenario; never throws for schema, stage or certificate problems.
RunOutput run(const RunConfig& config);
/// Parses and runs; schema problems give kSchemaViolation.
RunOutput run_json(const std::string& text, std::optional<std::uint64_t> seed_override = std::nullopt);

void write_outputs(const RunOutput& out, const std::filesystem::path& dir);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Seeded property checks over every module.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, const AveragingScheme& scheme);

}  // namespace ap::cli

#endif  // AP_CLI_HPP
