// Copyright 2026 The bnfdsp Authors.
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

#ifndef BNFDSP_CLI_H_
#define BNFDSP_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace bnf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

struct CliEnvironment {
  // Emit ANSI bold for headings. main() enables it for terminals unless
  // BNF_NO_COLOR is set.
  bool color = false;
};

// Subcommands: extract, compress, inspect, budget, export-weights.
// args[0] is the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, const CliEnvironment& env = {});

}  // namespace bnf::cli

#endif  // BNFDSP_CLI_H_
