/*
 * Copyright 2026 The newsrec Authors.
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

#ifndef NEWSREC_STRINGS_HPP_
#define NEWSREC_STRINGS_HPP_

#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

namespace newsrec {

template <class... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

// Split on a separator character; empty fields are kept.
std::vector<std::string> split(const std::string& text, char sep);

// Split on runs of spaces and tabs; empty fields are dropped.
std::vector<std::string> split_ws(const std::string& text);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::string trim(const std::string& text);

// Levenshtein distance; used for "did you mean" suggestions.
std::size_t edit_distance(const std::string& a, const std::string& b);

// Locale-independent numeric formatting/parsing for text artifacts.
std::string format_real(double value);              // round-trips a double
std::string format_fixed(double value, int digits); // fixed decimals
bool parse_double(const std::string& text, double* out);
bool parse_i64(const std::string& text, long long* out);
bool parse_u64(const std::string& text, unsigned long long* out);

}  // namespace newsrec

#endif  // NEWSREC_STRINGS_HPP_
