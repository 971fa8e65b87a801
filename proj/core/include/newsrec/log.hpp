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

#ifndef NEWSREC_LOG_HPP_
#define NEWSREC_LOG_HPP_

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace newsrec {

enum class Severity { kInfo, kWarning, kError };

std::string_view severity_name(Severity severity);

struct LogField {
  std::string key;
  std::string value;
};

template <class T>
LogField field(std::string key, const T& value) {
  std::ostringstream os;
  os << value;
  return LogField{std::move(key), os.str()};
}

LogField field(std::string key, double value);
LogField field(std::string key, float value);

// Structured logger. Each record carries a timestamp, severity, component
// and message plus optional key=value fields. Records go to stderr and, once
// open_run_file() was called, to a per-run log file as well. Timestamps are
// derived from a steady clock so they never go backwards within a run.
class Logger {
 public:
  explicit Logger(bool mirror_to_stderr = true);

  // Opens (truncates) the per-run log file. Throws Error on failure.
  void open_run_file(const std::string& path);
  const std::string& run_file() const { return run_file_; }

  void log(Severity severity, std::string_view component, std::string_view message,
           const std::vector<LogField>& fields = {});

  void info(std::string_view component, std::string_view message,
            const std::vector<LogField>& fields = {}) {
    log(Severity::kInfo, component, message, fields);
  }
  void warning(std::string_view component, std::string_view message,
               const std::vector<LogField>& fields = {}) {
    log(Severity::kWarning, component, message, fields);
  }
  void error(std::string_view component, std::string_view message,
             const std::vector<LogField>& fields = {}) {
    log(Severity::kError, component, message, fields);
  }

  int error_count() const { return errors_; }
  int warning_count() const { return warnings_; }

 private:
  std::string now_timestamp();

  bool mirror_to_stderr_;
  std::ofstream file_;
  std::string run_file_;
  std::chrono::system_clock::time_point wall_start_;
  std::chrono::steady_clock::time_point steady_start_;
  long long last_micros_ = 0;
  int errors_ = 0;
  int warnings_ = 0;
};

}  // namespace newsrec

#endif  // NEWSREC_LOG_HPP_
