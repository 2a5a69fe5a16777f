// Copyright 2026 The tracetype Authors
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

#ifndef TRACETYPE_CLI_HPP_
#define TRACETYPE_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace tracetype::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitUsage = 2;

// Runs one command; args exclude the program name.
//   record <program> [-o trace] [--keep-partial]
//   type <trace> <system> [--subject-prefix P]...
//   compare <trace> <system> <system>... [--subject-prefix P]... [--timing]
//   tagtest <trace> [--raw]
// --config-file F supplies key=value lines that act as extra --key flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tracetype::cli

#endif  // TRACETYPE_CLI_HPP_
