// Copyright 2026 The dop Authors
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

#pragma once

#include <iosfwd>
#include <string>

#include "dop/analysis.hpp"

namespace dop::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInvalidConfig = 2,
  kExitUndefined = 3,
};

// Parses argv (argv[0] is the program name) and runs one command.  Normal
// output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

// attacker_power,victim_power,attack,effectiveness,cost,cost_defined[,aggregators]
// with 9 significant digits and LF line ends.  The trailing column appears
// when any row carries an aggregator count; undefined costs print as nan.
std::string format_csv(const SweepTable& table);

// Throws std::runtime_error when the file cannot be written.
void emit_csv(const SweepTable& table, const std::string& path);

}  // namespace dop::cli
