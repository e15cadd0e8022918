// Copyright 2026 The chaoslab Authors
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

// RFC-4180 CSV output with round-trip float formatting.

#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace chaoslab::csv {

/// 17 significant digits (round-trips every double); NaN and infinities
/// are written as "nan", "inf", "-inf".
std::string format_double(double v);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string quote(std::string_view field);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace chaoslab::csv
