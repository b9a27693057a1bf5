// Copyright 2026 The Progse Authors. All Rights Reserved.
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


#ifndef PROGSE_CLI_COMMANDS_H_
#define PROGSE_CLI_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace progse::cli {

enum ExitCode { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

// Entry point of the progse tool. Never throws; returns the exit code.
int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace progse::cli

#endif  // PROGSE_CLI_COMMANDS_H_
