// Copyright 2026 The scvsafe Authors
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

#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "scvsafe/records.hpp"

namespace scvsafe {

/// One line {"test_id", "num_control_steps", "crash", "steps": [{"p",
/// "q_alpha", "q": [...]}]} without the trailing newline.
std::string to_jsonl_line(const TestRecord& record);

/// Parses one line; the cached weight is recomputed. Throws
/// std::invalid_argument on malformed input.
TestRecord from_jsonl_line(const std::string& line);

void write_jsonl(std::ostream& out, std::span<const TestRecord> records);
void write_jsonl(const std::filesystem::path& path, std::span<const TestRecord> records);

/// Reads every non-blank line; errors carry the path and line number.
std::vector<TestRecord> read_jsonl(std::istream& in, const std::string& source = "<stream>");
std::vector<TestRecord> read_jsonl(const std::filesystem::path& path);

}  // namespace scvsafe
