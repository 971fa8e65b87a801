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

#include "newsrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "newsrec/strings.hpp"
#include "newsrec/types.hpp"

namespace newsrec::eval {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(cat("metrics: ", scores.size(), " scores but ",
                             labels.size(), " labels"));
  }
  if (scores.empty()) throw Error("metrics: empty impression");
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw Error(cat("metrics: label must be 0 or 1, got ", label));
    }
  }
}

// Candidate order sorted by score descending, stable in the original order.
std::vector<std::size_t> ranking(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  std::size_t positives = 0;
  for (int label : labels) positives += static_cast<std::size_t>(label);
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error("auc needs at least one positive and one negative");
  }

  // Walk scores in ascending order. Every positive beats the negatives
  // strictly below it and half-ties with the negatives at its own score.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double wins = 0;
  std::size_t negatives_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t tied_pos = 0;
    std::size_t tied_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) {
        ++tied_pos;
      } else {
        ++tied_neg;
      }
      ++j;
    }
    wins += static_cast<double>(tied_pos) *
            (static_cast<double>(negatives_below) + 0.5 * static_cast<double>(tied_neg));
    negatives_below += tied_neg;
    i = j;
  }
  return wins / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double mrr(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const std::vector<std::size_t> order = ranking(scores);
  double sum = 0;
  std::size_t positives = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) {
      sum += 1.0 / static_cast<double>(rank + 1);
      ++positives;
    }
  }
  if (positives == 0) throw Error("mrr needs at least one positive");
  return sum / static_cast<double>(positives);
}

double ndcg_at_k(std::span<const double> scores, std::span<const int> labels, int k) {
  check_inputs(scores, labels);
  if (k < 1) throw Error(cat("ndcg cutoff must be >= 1, got ", k));
  const std::vector<std::size_t> order = ranking(scores);
  std::size_t positives = 0;
  for (int label : labels) positives += static_cast<std::size_t>(label);
  if (positives == 0) throw Error("ndcg needs at least one positive");

  const std::size_t cutoff = std::min(order.size(), static_cast<std::size_t>(k));
  double dcg = 0;
  for (std::size_t rank = 0; rank < cutoff; ++rank) {
    if (labels[order[rank]] == 1) {
      dcg += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
    }
  }
  const std::size_t ideal = std::min(positives, static_cast<std::size_t>(k));
  double idcg = 0;
  for (std::size_t rank = 0; rank < ideal; ++rank) {
    idcg += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
  }
  return dcg / idcg;
}

std::string render_metrics(const MetricsReport& report) {
  return cat("auc=", format_fixed(report.auc, 6),
                      " mrr=", format_fixed(report.mrr, 6),
                      " ndcg5=", format_fixed(report.ndcg5, 6),
                      " ndcg10=", format_fixed(report.ndcg10, 6),
                      " evaluated=", report.evaluated,
                      " skipped=", report.skipped);
}

}  // namespace newsrec::eval
