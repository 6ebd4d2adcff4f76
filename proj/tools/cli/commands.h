// Copyright 2026 The qconvsim Authors
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

#ifndef QCONVSIM_TOOLS_COMMANDS_H
#define QCONVSIM_TOOLS_COMMANDS_H

#include <ostream>

namespace qconvsim::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitSchema = 2, kExitRuntime = 3 };

/// Entry point shared by the binary and the tests.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qconvsim::cli

#endif  // QCONVSIM_TOOLS_COMMANDS_H
