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

#ifndef NEWSREC_COMMANDS_HPP_
#define NEWSREC_COMMANDS_HPP_

#include <span>
#include <string>

// The five pipeline subcommands. Each parses its own schema-validated
// settings (flag over file over default), writes a structured log header
// with every resolved setting, and exits 0 exactly when no error-severity
// record was logged.
//
//   preprocess  raw news/behaviors/embeddings -> processed data directory
//   train       processed data -> checkpoints (optionally a grid search)
//   evaluate    checkpoint + dev impressions -> ranking metrics
//   bench       checkpoint + instances -> per-layout throughput reports
//   explain     checkpoint + (user, news) -> topic explanation text

namespace newsrec::cli {

int cmd_preprocess(std::span<const std::string> args);
int cmd_train(std::span<const std::string> args);
int cmd_evaluate(std::span<const std::string> args);
int cmd_bench(std::span<const std::string> args);
int cmd_explain(std::span<const std::string> args);

// Dispatches argv[1] to a subcommand; prints usage on unknown input.
int run_main(int argc, char** argv);

}  // namespace newsrec::cli

#endif  // NEWSREC_COMMANDS_HPP_
