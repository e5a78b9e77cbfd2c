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

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ap/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Almost periodic selections: metrics, perturbations, partitions and selections"};
  std::string scenario;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("scenario", scenario, "metrics | almost_periods | perturb | partition | select | verify")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ap::cli::kSchemaViolation;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "schema violation: cannot read " << config_path << "\n";
    return ap::cli::kSchemaViolation;
  }
  std::ostringstream text;
  text << in.rdbuf();

  ap::cli::RunOutput out;
  try {
    auto j = ap::io::json::parse(text.str());
    if (j.is_object() && j.contains("scenario") && j["scenario"] != scenario) {
      std::cerr << "schema violation: config scenario " << j["scenario"] << " does not match '" << scenario
                << "'\n";
      return ap::cli::kSchemaViolation;
    }
    if (j.is_object()) j["scenario"] = scenario;
    out = ap::cli::run_json(j.dump(), seed);
  } catch (const ap::io::json::exception& e) {
    std::cerr << "schema violation: " << e.what() << "\n";
    return ap::cli::kSchemaViolation;
  }

  try {
    ap::cli::write_outputs(out, out_dir);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return ap::cli::kSchemaViolation;
  }
  if (!out.message.empty()) std::cerr << out.message << "\n";
  return out.exit_code;
}
