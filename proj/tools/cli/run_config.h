//
// Copyright 2026 The DPGM Authors
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
//

// Command-line configuration: flags, an optional TOML/INI config file and
// documented defaults merged into one validated RunConfig.

#ifndef DPGM_TOOLS_CLI_RUN_CONFIG_H_
#define DPGM_TOOLS_CLI_RUN_CONFIG_H_

#include <cstddef>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "dpgm/data.h"
#include "dpgm/eval.h"
#include "dpgm/mixture.h"
#include "dpgm/rbm.h"

namespace dpgm::cli {

enum class Command { kAccountant, kCluster, kTrain, kGenerate, kEvaluate };

std::string ToString(Command command);

struct RunConfig {
  Command command = Command::kAccountant;
  std::string config_path;

  std::string data_path;
  DataFormat format = DataFormat::kSparseItems;
  int binarize_threshold = 127;
  std::string labels_path;
  std::string model_path;
  std::string synthetic_path;
  std::string output_path;
  std::string log_path;
  std::string report_path;
  std::string csv_path;

  DpgmConfig dpgm;

  // accountant
  std::optional<double> q;
  std::optional<std::size_t> dataset_size;
  std::vector<double> epochs_grid;

  // generate
  std::size_t count = 0;
  int burn_in = kDefaultBurnIn;

  // evaluate
  int queries = 500;
  QuerySemantics semantics = QuerySemantics::kAny;

  int workers = 1;
};

// Thrown for --help; carries the rendered help text.
struct HelpRequested {
  std::string text;
};

// `args` excludes the program name. Precedence is flag > config file >
// default. Throws DomainError on unknown keys, conflicting or missing
// arguments and on zero noise without --unsafe-no-privacy.
RunConfig ParseConfig(const std::vector<std::string>& args);

// Fills the 1/|D| default for delta once the dataset size is known.
void ResolveDelta(RunConfig& config, std::size_t dataset_size);

nlohmann::json ToJson(const RunConfig& config);

}  // namespace dpgm::cli

#endif  // DPGM_TOOLS_CLI_RUN_CONFIG_H_
