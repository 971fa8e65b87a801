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

#include "newsrec/throughput.hpp"

#include <fstream>
#include <string>

#include "newsrec/strings.hpp"

namespace newsrec::eval {

double improvement_percent(double fast, double slow) {
  if (!(slow > 0)) throw Error("improvement baseline must be > 0");
  return (fast / slow - 1.0) * 100.0;
}

std::string hardware_summary() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.rfind("model name", 0) == 0) {
      const std::size_t colon = line.find(':');
      if (colon != std::string::npos) cpu = trim(line.substr(colon + 1));
      break;
    }
  }
  return cat(cpu, "; compiler ", __VERSION__, "; threads=1");
}

std::vector<std::string> reference_context() {
  return {
      "reference (A100 40GB GPU): self-attention zero_pad 769.9 train/s, 880.8 eval/s",
      "reference (A100 40GB GPU): self-attention concat 1630.0 train/s (+111.77%), 2622.5 eval/s (+197.72%)",
      "reference (A100 40GB GPU): topic-attention zero_pad 767.4 train/s, 790.8 eval/s",
      "reference (A100 40GB GPU): topic-attention concat 1554.9 train/s (+102.63%), 2402.8 eval/s (+203.88%)",
  };
}

std::string render_throughput(const ThroughputReport& report) {
  std::string out;
  out += cat("layout=", report.layout, "\n");
  out += cat("train_samples=", report.train.samples, "\n");
  out += cat("train_seconds=", format_real(report.train.seconds), "\n");
  out += cat("train_per_second=", format_fixed(report.train.per_second, 1), "\n");
  out += cat("eval_samples=", report.eval.samples, "\n");
  out += cat("eval_seconds=", format_real(report.eval.seconds), "\n");
  out += cat("eval_per_second=", format_fixed(report.eval.per_second, 1), "\n");
  out += cat("hardware=", report.hardware, "\n");
  for (const std::string& line : reference_context()) out += cat("# ", line, "\n");
  return out;
}

std::string throughput_machine_line(const ThroughputReport& report) {
  return cat("layout=", report.layout, " train_samples=", report.train.samples,
             " train_seconds=", format_real(report.train.seconds),
             " train_per_second=", format_real(report.train.per_second),
             " eval_samples=", report.eval.samples,
             " eval_seconds=", format_real(report.eval.seconds),
             " eval_per_second=", format_real(report.eval.per_second));
}

}  // namespace newsrec::eval
