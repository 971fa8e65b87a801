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

#ifndef NEWSREC_METRICS_HPP_
#define NEWSREC_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>

namespace newsrec::eval {

// Ranking metrics over one impression: `scores` and binary `labels` aligned
// by candidate. Ranking sorts by score descending; equal scores keep their
// original candidate order (stable).

// Probability that a random positive outranks a random negative; ties count
// one half. Requires at least one positive and one negative (Error).
double auc(std::span<const double> scores, std::span<const int> labels);

// Mean over positives of 1/rank. Requires at least one positive (Error).
double mrr(std::span<const double> scores, std::span<const int> labels);

// Binary-gain nDCG over the top k: DCG = sum of 1/log2(i+1) at positive
// ranks i <= k, normalized by the ideal DCG. Requires k >= 1 and at least
// one positive (Error).
double ndcg_at_k(std::span<const double> scores, std::span<const int> labels, int k);

struct MetricsReport {
  double auc = 0;
  double mrr = 0;
  double ndcg5 = 0;
  double ndcg10 = 0;
  std::size_t evaluated = 0;  // impressions the means run over
  std::size_t skipped = 0;    // impressions without a positive or a negative
};

// key=value single-line rendering, for logs and command output.
std::string render_metrics(const MetricsReport& report);

}  // namespace newsrec::eval

#endif  // NEWSREC_METRICS_HPP_
