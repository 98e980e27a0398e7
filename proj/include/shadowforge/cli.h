// Copyright 2026 The ShadowForge Authors.
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

#ifndef SHADOWFORGE_CLI_H_
#define SHADOWFORGE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace shadowforge::cli {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;  // bad flags, bad input files
inline constexpr int kExitIo = 3;     // filesystem / environment failures

// Runs the command line (args excludes the program name). Diagnostics go to
// `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace shadowforge::cli

#endif  // SHADOWFORGE_CLI_H_
