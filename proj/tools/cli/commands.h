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

#ifndef DPGM_TOOLS_CLI_COMMANDS_H_
#define DPGM_TOOLS_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

#include "cli/run_config.h"

namespace dpgm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

// Executes one command. Throws dpgm::Error; outputs created by the command
// are removed before the error propagates.
void Run(const RunConfig& config, std::ostream& out);

// Parses, runs and maps errors to exit codes. Log verbosity comes from the
// DPGM_LOG_LEVEL environment variable.
int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err);

}  // namespace dpgm::cli

#endif  // DPGM_TOOLS_CLI_COMMANDS_H_
