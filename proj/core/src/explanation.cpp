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

#include "newsrec/explanation.hpp"

#include <algorithm>
#include <set>

#include "newsrec/strings.hpp"

namespace newsrec::eval {
namespace detail {

std::vector<Index> distinct_words(const IntMatrix& tokens) {
  std::set<Index> seen;
  for (Index r = 0; r < tokens.rows(); ++r) {
    for (Index c = 0; c < tokens.cols(); ++c) {
      if (tokens(r, c) >= 2) seen.insert(tokens(r, c));
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<Index> top_terms(const std::vector<Index>& words, const Matrix<double>& weights,
                             Index topic, int count) {
  std::vector<Index> order(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) order[i] = static_cast<Index>(i);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return weights(a, topic) > weights(b, topic);
  });
  std::vector<Index> out;
  for (std::size_t i = 0; i < order.size() && out.size() < static_cast<std::size_t>(count); ++i) {
    out.push_back(words[static_cast<std::size_t>(order[i])]);
  }
  return out;
}

}  // namespace detail

std::string render_explanation(const TopicExplanation& explanation,
                               const ExplanationOptions& options) {
  const auto highlight = [&](const std::vector<std::string>& terms) {
    std::string line;
    for (const std::string& term : terms) {
      if (!line.empty()) line += " ";
      line += cat(options.open, term, options.close);
    }
    return line.empty() ? "(none)" : line;
  };

  std::string out = cat("recommendation: user ", explanation.user_id, " -> news ",
                        explanation.news_id, "\n");
  for (const SharedTopic& topic : explanation.topics) {
    out += cat("topic ", topic.topic, ": shared ", format_fixed(topic.shared, 4), " (user ",
               format_fixed(topic.user_weight, 4), ", news ", format_fixed(topic.news_weight, 4),
               ")\n");
    out += cat("  history terms: ", highlight(topic.history_terms), "\n");
    out += cat("  news terms: ", highlight(topic.news_terms), "\n");
  }
  if (!explanation.topics.empty()) {
    const SharedTopic& lead = explanation.topics.front();
    out += cat("rationale: the browsing history and this article share topic ", lead.topic,
               " most strongly (overlap ", format_fixed(lead.shared, 4), ")\n");
  }
  return out;
}

}  // namespace newsrec::eval
