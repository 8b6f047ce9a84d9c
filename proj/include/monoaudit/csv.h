/*
 * Copyright 2026 The monoaudit Authors.
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

#ifndef MONOAUDIT_CSV_H_
#define MONOAUDIT_CSV_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace monoaudit {

// Streaming RFC 4180 reader. Quoted fields may contain separators, doubled
// quotes and line breaks; `line()` reports the physical line on which the
// most recently returned row started.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, char separator = ',');

  // Returns std::nullopt at end of input. Throws DataError on an unterminated
  // quoted field.
  std::optional<std::vector<std::string>> next();

  std::size_t line() const { return row_line_; }

 private:
  std::istream& in_;
  char separator_;
  std::size_t next_line_ = 1;
  std::size_t row_line_ = 0;
};

std::string csv_escape(std::string_view field, char separator = ',');

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields,
                   char separator = ',');

// Shortest decimal text that parses back to the identical double.
std::string format_exact(double value);

// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

// Strict full-string parse; std::nullopt when `text` is not a number.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

}  // namespace monoaudit

#endif  // MONOAUDIT_CSV_H_
