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

#ifndef NEWSREC_EVALUATOR_HPP_
#define NEWSREC_EVALUATOR_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "newsrec/batching.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/encoders.hpp"
#include "newsrec/metrics.hpp"
#include "newsrec/model.hpp"
#include "newsrec/types.hpp"

// Impression-level model evaluation. The concat layout encodes every
// distinct news referenced by the evaluated impressions exactly once per
// pass (the news-vector cache); the zero-pad layout encodes padded history
// blocks and candidates per impression, duplicates included. Both produce
// the same metric values up to floating-point noise.

namespace newsrec::eval {

struct EvalOptions {
  batching::Layout layout = batching::Layout::kConcat;
  Index history_max = 50;
  Index block = 256;  // impressions scored per user-encoder call
};

struct EvalStats {
  std::size_t encoded_rows = 0;  // news rows pushed through the news encoder
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

// News vectors (and topic mixtures) keyed by feature-matrix row. Slots are
// assigned in first-request order; `vectors()` may hold spare capacity rows
// past `size()`, which are never referenced by returned slots.
template <class Real>
class NewsVectorCache {
 public:
  // Encodes any rows not already cached, in first-appearance order, and
  // returns the number of news rows encoded by this call.
  Index require(const data::FeatureMatrix& features, const model::Params<Real>& params,
                std::span<const Index> rows) {
    if (slot_of_row_.empty()) slot_of_row_.assign(static_cast<std::size_t>(features.rows()), -1);
    std::vector<Index> missing;
    for (Index row : rows) {
      if (row < 0 || row >= features.rows()) {
        throw Error(cat("feature row ", row, " out of range [0, ", features.rows(), ")"));
      }
      Index& slot = slot_of_row_[static_cast<std::size_t>(row)];
      if (slot < 0) {
        slot = count_ + static_cast<Index>(missing.size());
        missing.push_back(row);
      }
    }
    if (missing.empty()) return 0;

    const model::NewsEncoding<Real> fresh =
        model::encode_news<Real>(features.gather(missing), params);
    const Index added = static_cast<Index>(missing.size());
    if (count_ + added > vectors_.rows()) {
      const Index capacity = std::max<Index>(count_ + added, 2 * std::max<Index>(vectors_.rows(), 64));
      vectors_.conservativeResize(capacity, params.config.model_dim());
      if (fresh.mixtures.size() > 0) {
        mixtures_.conservativeResize(capacity, params.config.topics);
      }
    }
    vectors_.middleRows(count_, added) = fresh.vectors;
    if (fresh.mixtures.size() > 0) mixtures_.middleRows(count_, added) = fresh.mixtures;
    count_ += added;
    encoded_rows_ += static_cast<std::size_t>(added);
    return added;
  }

  // Slot of a previously required feature row; Error when absent.
  Index slot(Index fm_row) const {
    if (fm_row < 0 || fm_row >= static_cast<Index>(slot_of_row_.size()) ||
        slot_of_row_[static_cast<std::size_t>(fm_row)] < 0) {
      throw Error(cat("feature row ", fm_row, " is not in the news-vector cache"));
    }
    return slot_of_row_[static_cast<std::size_t>(fm_row)];
  }

  const Matrix<Real>& vectors() const { return vectors_; }
  const Matrix<Real>& mixtures() const { return mixtures_; }
  Index size() const { return count_; }
  std::size_t encoded_rows() const { return encoded_rows_; }

 private:
  std::vector<Index> slot_of_row_;
  Matrix<Real> vectors_;
  Matrix<Real> mixtures_;
  Index count_ = 0;
  std::size_t encoded_rows_ = 0;
};

namespace detail {

// One impression resolved to feature rows: history filtered of empty rows
// and truncated to the most recent history_max, the same policy the
// training sampler applies.
struct ResolvedImpression {
  std::vector<Index> history;
  std::vector<Index> candidates;
  std::vector<int> labels;
};

inline bool resolve_impression(const data::ImpressionRecord& impression,
                               const data::FeatureMatrix& features, Index history_max,
                               ResolvedImpression& out) {
  out.history.clear();
  out.candidates.clear();
  out.labels.clear();
  for (const std::string& id : impression.history) {
    const Index row = features.row_of(id);
    if (!features.row_is_empty(row)) out.history.push_back(row);
  }
  if (static_cast<Index>(out.history.size()) > history_max) {
    out.history.erase(out.history.begin(),
                      out.history.end() - static_cast<std::ptrdiff_t>(history_max));
  }
  bool has_positive = false;
  bool has_negative = false;
  for (const data::CandidateLabel& cand : impression.candidates) {
    out.candidates.push_back(features.row_of(cand.news_id));
    out.labels.push_back(cand.label);
    (cand.label == 1 ? has_positive : has_negative) = true;
  }
  return has_positive && has_negative;
}

}  // namespace detail

// Evaluates the model on every impression: AUC, MRR, nDCG@5, nDCG@10
// averaged unweighted over impressions that have at least one positive and
// one negative; the rest are skipped and counted. `stats`, when given,
// receives the encoder-row counter the cache tests assert on.
template <class Real>
MetricsReport evaluate_model(const model::Params<Real>& params,
                             const std::vector<data::ImpressionRecord>& impressions,
                             const data::FeatureMatrix& features, const EvalOptions& options,
                             EvalStats* stats = nullptr) {
  if (options.history_max < 1) {
    throw Error(cat("history_max must be >= 1, got ", options.history_max));
  }
  if (options.block < 1) throw Error(cat("evaluation block must be >= 1, got ", options.block));
  const bool topic = params.config.variant == model::Variant::kTopicAttention;
  const bool concat = options.layout == batching::Layout::kConcat;

  std::vector<detail::ResolvedImpression> resolved;
  resolved.reserve(impressions.size());
  std::size_t skipped = 0;
  {
    detail::ResolvedImpression item;
    for (const data::ImpressionRecord& impression : impressions) {
      if (detail::resolve_impression(impression, features, options.history_max, item)) {
        resolved.push_back(item);
      } else {
        ++skipped;
      }
    }
  }

  NewsVectorCache<Real> cache;
  if (concat) {
    std::vector<Index> needed;
    for (const detail::ResolvedImpression& item : resolved) {
      needed.insert(needed.end(), item.history.begin(), item.history.end());
      needed.insert(needed.end(), item.candidates.begin(), item.candidates.end());
    }
    cache.require(features, params, needed);
  }

  MetricsReport report;
  report.skipped = skipped;
  std::vector<double> scores;
  std::vector<int> labels;

  for (std::size_t begin = 0; begin < resolved.size();
       begin += static_cast<std::size_t>(options.block)) {
    const std::size_t end =
        std::min(resolved.size(), begin + static_cast<std::size_t>(options.block));
    const Index count = static_cast<Index>(end - begin);

    // User vectors (and mixtures) for the block, through the layout's own
    // plumbing: ragged segments over cached vectors, or padded blocks that
    // re-encode every history and candidate row.
    Matrix<Real> users;
    Matrix<Real> user_mixtures;
    model::NewsEncoding<Real> block_news;     // zero-pad candidate encodings
    std::vector<std::size_t> cand_starts(static_cast<std::size_t>(count) + 1, 0);

    if (concat) {
      std::vector<Index> history_index;
      std::vector<Index> offsets(1, 0);
      for (std::size_t i = begin; i < end; ++i) {
        for (Index row : resolved[i].history) history_index.push_back(cache.slot(row));
        offsets.push_back(static_cast<Index>(history_index.size()));
      }
      users = model::encode_user_concat(cache.vectors(), history_index, offsets, params);
      if (topic) {
        user_mixtures = Matrix<Real>::Zero(count, params.config.topics);
        for (Index b = 0; b < count; ++b) {
          const Index len = offsets[static_cast<std::size_t>(b) + 1] - offsets[static_cast<std::size_t>(b)];
          for (Index t = offsets[static_cast<std::size_t>(b)]; t < offsets[static_cast<std::size_t>(b) + 1]; ++t) {
            user_mixtures.row(b) += cache.mixtures().row(history_index[static_cast<std::size_t>(t)]);
          }
          if (len > 0) user_mixtures.row(b) /= static_cast<Real>(len);
        }
      }
    } else {
      const Index h_max = options.history_max;
      std::vector<Index> hist_rows(static_cast<std::size_t>(count * h_max), 0);
      ByteMatrix mask = ByteMatrix::Zero(count, h_max);
      std::vector<Index> cand_rows;
      for (std::size_t i = begin; i < end; ++i) {
        const Index b = static_cast<Index>(i - begin);
        const detail::ResolvedImpression& item = resolved[i];
        for (std::size_t h = 0; h < item.history.size(); ++h) {
          hist_rows[static_cast<std::size_t>(b * h_max) + h] = item.history[h];
          mask(b, static_cast<Index>(h)) = 1;
        }
        cand_rows.insert(cand_rows.end(), item.candidates.begin(), item.candidates.end());
        cand_starts[static_cast<std::size_t>(b) + 1] = cand_rows.size();
      }
      const model::NewsEncoding<Real> hist =
          model::encode_news<Real>(features.gather(hist_rows), params);
      block_news = model::encode_news<Real>(features.gather(cand_rows), params);
      if (stats) {
        stats->encoded_rows += hist_rows.size() + cand_rows.size();
      }
      users = model::encode_user_zero_pad(hist.vectors, h_max, mask, params);
      if (topic) {
        user_mixtures = Matrix<Real>::Zero(count, params.config.topics);
        for (Index b = 0; b < count; ++b) {
          Index valid = 0;
          for (Index h = 0; h < h_max; ++h) {
            if (mask(b, h)) {
              user_mixtures.row(b) += hist.mixtures.row(b * h_max + h);
              ++valid;
            }
          }
          if (valid > 0) user_mixtures.row(b) /= static_cast<Real>(valid);
        }
      }
    }

    for (Index b = 0; b < count; ++b) {
      const detail::ResolvedImpression& item = resolved[begin + static_cast<std::size_t>(b)];
      scores.clear();
      labels.assign(item.labels.begin(), item.labels.end());
      for (std::size_t c = 0; c < item.candidates.size(); ++c) {
        Index row;  // row into the vector matrix used below
        const Matrix<Real>* vecs;
        const Matrix<Real>* mixes;
        if (concat) {
          row = cache.slot(item.candidates[c]);
          vecs = &cache.vectors();
          mixes = &cache.mixtures();
        } else {
          row = static_cast<Index>(cand_starts[static_cast<std::size_t>(b)] + c);
          vecs = &block_news.vectors;
          mixes = &block_news.mixtures;
        }
        double value =
            static_cast<double>((users.row(b).array() * vecs->row(row).array()).sum());
        if (topic) {
          value += static_cast<double>(
              (user_mixtures.row(b).array() * mixes->row(row).array()).sum());
        }
        scores.push_back(value);
      }
      report.auc += auc(scores, labels);
      report.mrr += mrr(scores, labels);
      report.ndcg5 += ndcg_at_k(scores, labels, 5);
      report.ndcg10 += ndcg_at_k(scores, labels, 10);
      ++report.evaluated;
    }
  }

  if (report.evaluated > 0) {
    const double inv = 1.0 / static_cast<double>(report.evaluated);
    report.auc *= inv;
    report.mrr *= inv;
    report.ndcg5 *= inv;
    report.ndcg10 *= inv;
  }
  if (stats) {
    if (concat) stats->encoded_rows += cache.encoded_rows();
    stats->evaluated = report.evaluated;
    stats->skipped = report.skipped;
  }
  return report;
}

}  // namespace newsrec::eval

#endif  // NEWSREC_EVALUATOR_HPP_
