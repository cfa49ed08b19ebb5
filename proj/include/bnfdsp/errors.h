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

#ifndef BNFDSP_ERRORS_H_
#define BNFDSP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace bnf {

// Malformed or inconsistent data read from outside the process: WAV files,
// weight files, caches. Programming errors (bad shapes, invalid configs)
// use std::invalid_argument / std::out_of_range instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bnf

#endif  // BNFDSP_ERRORS_H_
