// Copyright 2026 The eitecho Authors
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

#ifndef EITECHO_CSV_HPP
#define EITECHO_CSV_HPP

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace eitecho {

/// Minimal RFC-4180 writer. Numbers are printed with %.12g so identical
/// inputs always produce identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& header(std::initializer_list<std::string_view> names);
  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

std::string format_number(double value);

}  // namespace eitecho

#endif  // EITECHO_CSV_HPP
