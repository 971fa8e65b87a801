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

#ifndef NEWSREC_EXPLANATION_HPP_
#define NEWSREC_EXPLANATION_HPP_

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "newsrec/data_ingest.hpp"
#include "newsrec/encoders.hpp"
#include "newsrec/types.hpp"

// Topic-centric recommendation explanations. A user's topic mixture is the
// mean of their history news mixtures; a topic is shared with a candidate
// when both mixtures put weight on it (scored by the elementwise min). Each
// reported topic carries its strongest terms, separately from the history
// and from the recommended news, every one verbatim from those token lists.

namespace newsrec::eval {

struct SharedTopic {
  Index topic = 0;
  double user_weight = 0;  // user mixture at this topic
  double news_weight = 0;  // candidate mixture at this topic
  double shared = 0;       // min(user_weight, news_weight)
  std::vector<std::string> history_terms;
  std::vector<std::string> news_terms;
};

struct TopicExplanation {
  std::string user_id;
  std::string news_id;
  std::vector<SharedTopic> topics;  // shared weight descending
  std::string rendered;
};

struct ExplanationOptions {
  int top_t = 3;           // topics reported
  int top_m = 5;           // terms per topic per side
  std::string open = "[[";   // term highlight delimiters
  std::string close = "]]";
  Index history_max = 50;  // most recent history entries considered
};

// Text block: one header line, then per topic its weights and highlighted
// term lists. Deterministic for fixed inputs.
std::string render_explanation(const TopicExplanation& explanation,
                               const ExplanationOptions& options);

namespace detail {

// Distinct real-word token indices (reserved indices dropped), ascending.
std::vector<Index> distinct_words(const IntMatrix& tokens);

// Top `count` of `words` by column `topic` of `weights` (rows align with
// `words`), weight descending, ties to the smaller vocabulary index.
std::vector<Index> top_terms(const std::vector<Index>& words, const Matrix<double>& weights,
                             Index topic, int count);

}  // namespace detail

template <class Real>
TopicExplanation generate_explanation(const std::string& user_id,
                                      const std::vector<std::string>& history_ids,
                                      const std::string& news_id,
                                      const model::Params<Real>& params,
                                      const data::FeatureMatrix& features,
                                      const data::Vocabulary& vocab,
                                      const ExplanationOptions& options) {
  if (params.config.variant != model::Variant::kTopicAttention) {
    throw Error("explanations need the topic-attention variant");
  }
  if (options.top_t < 1 || options.top_m < 1) {
    throw Error(cat("top_t and top_m must be >= 1, got ", options.top_t, " and ", options.top_m));
  }

  std::vector<Index> history_rows;
  for (const std::string& id : history_ids) {
    const Index row = features.row_of(id);
    if (!features.row_is_empty(row)) history_rows.push_back(row);
  }
  if (static_cast<Index>(history_rows.size()) > options.history_max) {
    history_rows.erase(history_rows.begin(),
                       history_rows.end() - static_cast<std::ptrdiff_t>(options.history_max));
  }
  if (history_rows.empty()) {
    throw Error(cat("user ", user_id, " has no usable history; explanations need one"));
  }
  const Index news_row = features.row_of(news_id);

  std::vector<Index> rows = history_rows;
  rows.push_back(news_row);
  const IntMatrix tokens = features.gather(rows);
  const model::NewsEncoding<Real> encoded = model::encode_news<Real>(tokens, params);

  const Index topics = params.config.topics;
  Matrix<double> user_mix = Matrix<double>::Zero(1, topics);
  for (std::size_t h = 0; h < history_rows.size(); ++h) {
    user_mix += encoded.mixtures.row(static_cast<Index>(h)).template cast<double>();
  }
  user_mix /= static_cast<double>(history_rows.size());
  const Matrix<double> news_mix =
      encoded.mixtures.row(static_cast<Index>(history_rows.size())).template cast<double>();

  // Word-level topic weights for the candidate term lists. Weights depend
  // only on the word embedding, so each distinct word is scored once.
  const IntMatrix history_tokens = tokens.topRows(static_cast<Index>(history_rows.size()));
  const IntMatrix news_tokens = tokens.bottomRows(1);
  const std::vector<Index> history_words = detail::distinct_words(history_tokens);
  const std::vector<Index> news_words = detail::distinct_words(news_tokens);

  const auto word_weights = [&](const std::vector<Index>& words) {
    Matrix<double> result(static_cast<Index>(words.size()), topics);
    if (words.empty()) return result;
    IntMatrix as_rows(static_cast<Index>(words.size()), 1);
    for (std::size_t w = 0; w < words.size(); ++w) as_rows(static_cast<Index>(w), 0) = words[w];
    const Matrix<Real> x = model::embed_tokens<Real>(as_rows, params.embedding);
    result = model::topic_word_weights(x, params.topic_matrix,
                                       static_cast<Real>(params.config.temperature))
                 .template cast<double>();
    return result;
  };
  const Matrix<double> history_weights = word_weights(history_words);
  const Matrix<double> news_weights = word_weights(news_words);

  std::vector<Index> order(static_cast<std::size_t>(topics));
  for (Index t = 0; t < topics; ++t) order[static_cast<std::size_t>(t)] = t;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::min(user_mix(0, a), news_mix(0, a)) > std::min(user_mix(0, b), news_mix(0, b));
  });

  TopicExplanation out;
  out.user_id = user_id;
  out.news_id = news_id;
  const int keep = std::min<int>(options.top_t, static_cast<int>(topics));
  for (int i = 0; i < keep; ++i) {
    const Index t = order[static_cast<std::size_t>(i)];
    SharedTopic topic;
    topic.topic = t;
    topic.user_weight = user_mix(0, t);
    topic.news_weight = news_mix(0, t);
    topic.shared = std::min(topic.user_weight, topic.news_weight);
    for (Index w : detail::top_terms(history_words, history_weights, t, options.top_m)) {
      topic.history_terms.push_back(vocab.word(w));
    }
    for (Index w : detail::top_terms(news_words, news_weights, t, options.top_m)) {
      topic.news_terms.push_back(vocab.word(w));
    }
    out.topics.push_back(std::move(topic));
  }
  out.rendered = render_explanation(out, options);
  return out;
}

}  // namespace newsrec::eval

#endif  // NEWSREC_EXPLANATION_HPP_
