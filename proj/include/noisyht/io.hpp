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

#ifndef NOISYHT_IO_HPP
#define NOISYHT_IO_HPP

#include "noisyht/probcore.hpp"

#include <map>
#include <optional>
#include <string>

namespace noisyht {

/// On-disk description of distributions and channels. JSON with keys
/// "alphabets" (name -> size or label list), "joint" (P_UV, row-major) and
/// "channel" (P_Y|X, rows = inputs). Matrix entries may be JSON numbers or
/// decimal strings; the writer emits numbers with 17 significant digits in
/// a fixed key order, so serialization is deterministic.
struct Document {
  std::map<std::string, Alphabet> alphabets;
  std::optional<JointPmf> joint;
  std::optional<CondPmf> channel;
};

Document parse_document(const std::string& text);
Document load_document(const std::string& path);

std::string serialize_document(const Document& doc);
/// Atomic: writes a temp file in the same directory, then renames.
void save_document(const Document& doc, const std::string& path);

/// Shortest fixed-precision rendering used across all emitters: 17
/// significant digits, '.' decimal separator, locale-independent.
std::string format_number(double value);

void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace noisyht

#endif  // NOISYHT_IO_HPP
