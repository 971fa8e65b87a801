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

#include "newsrec/log.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <iostream>

#include "newsrec/strings.hpp"
#include "newsrec/types.hpp"

namespace newsrec {

std::string_view severity_name(Severity severity) {
  switch (severity) {
    case Severity::kInfo:
      return "INFO";
    case Severity::kWarning:
      return "WARN";
    case Severity::kError:
      return "ERROR";
  }
  return "INFO";
}

LogField field(std::string key, double value) {
  return LogField{std::move(key), format_real(value)};
}

LogField field(std::string key, float value) {
  return LogField{std::move(key), format_real(static_cast<double>(value))};
}

Logger::Logger(bool mirror_to_stderr)
    : mirror_to_stderr_(mirror_to_stderr),
      wall_start_(std::chrono::system_clock::now()),
      steady_start_(std::chrono::steady_clock::now()) {}

void Logger::open_run_file(const std::string& path) {
  file_.open(path, std::ios::out | std::ios::trunc);
  if (!file_) throw Error(cat("cannot open log file for writing: ", path));
  run_file_ = path;
}

std::string Logger::now_timestamp() {
  const auto steady_now = std::chrono::steady_clock::now();
  const long long offset_micros =
      std::chrono::duration_cast<std::chrono::microseconds>(steady_now - steady_start_).count();
  last_micros_ = std::max(last_micros_, offset_micros);
  const auto stamp = wall_start_ + std::chrono::microseconds(last_micros_);
  const std::time_t seconds = std::chrono::system_clock::to_time_t(stamp);
  const long long micros =
      std::chrono::duration_cast<std::chrono::microseconds>(stamp.time_since_epoch()).count() %
      1000000;
  std::tm parts{};
  gmtime_r(&seconds, &parts);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ",
                parts.tm_year + 1900, parts.tm_mon + 1, parts.tm_mday, parts.tm_hour,
                parts.tm_min, parts.tm_sec, micros < 0 ? 0 : micros);
  return buffer;
}

namespace {

bool needs_quotes(std::string_view text) {
  return text.empty() ||
         text.find_first_of(" \t\"") != std::string_view::npos;
}

void append_quoted(std::string& line, std::string_view text) {
  if (!needs_quotes(text)) {
    line.append(text);
    return;
  }
  line.push_back('"');
  for (char c : text) {
    if (c == '"' || c == '\\') line.push_back('\\');
    line.push_back(c);
  }
  line.push_back('"');
}

}  // namespace

void Logger::log(Severity severity, std::string_view component, std::string_view message,
                 const std::vector<LogField>& fields) {
  if (severity == Severity::kError) ++errors_;
  if (severity == Severity::kWarning) ++warnings_;

  std::string line = now_timestamp();
  line.push_back(' ');
  line.append(severity_name(severity));
  line.push_back(' ');
  line.append(component);
  line.push_back(' ');
  append_quoted(line, message);
  for (const LogField& f : fields) {
    line.push_back(' ');
    line.append(f.key);
    line.push_back('=');
    append_quoted(line, f.value);
  }
  line.push_back('\n');

  if (mirror_to_stderr_) {
    std::cerr << line;
  }
  if (file_.is_open()) {
    file_ << line;
    file_.flush();
  }
}

}  // namespace newsrec
