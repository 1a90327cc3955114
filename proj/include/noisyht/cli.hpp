// Copyright 2026 The noisyht authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOISYHT_CLI_HPP
#define NOISYHT_CLI_HPP

#include <string>
#include <vector>

namespace noisyht::cli {

/// Dispatch a command line (program name excluded). Exit status: 0 on
/// success, 1 on validation errors, 2 on computational refusals (size
/// caps). All file outputs are written atomically and every run prints
/// its fully-resolved configuration.
int run(const std::vector<std::string>& args);

}  // namespace noisyht::cli

#endif  // NOISYHT_CLI_HPP
