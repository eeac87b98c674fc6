/*
 * Copyright 2026 The GRAF Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace graf {

// RFC-4180 style table: first record is the header, fields may be quoted
// with "" as an escaped quote, CRLF or LF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Throws DataError naming the line on ragged rows, unterminated quotes or an
// empty input.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string& path);

// Quotes a field only when it needs it.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Whole-string double parse; false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& value);

}  // namespace graf
