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

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "bnfdsp/cli.h"

int main(int argc, char** argv) {
  bnf::cli::CliEnvironment env;
  env.color = isatty(STDOUT_FILENO) != 0 && std::getenv("BNF_NO_COLOR") == nullptr;
  return bnf::cli::Run(std::vector<std::string>(argv, argv + argc), std::cout,
                       std::cerr, env);
}
