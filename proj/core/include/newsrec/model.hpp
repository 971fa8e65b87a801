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

#ifndef NEWSREC_MODEL_HPP_
#define NEWSREC_MODEL_HPP_

#include <span>

#include "newsrec/batching.hpp"
#include "newsrec/encoders.hpp"
#include "newsrec/params.hpp"
#include "newsrec/types.hpp"

// Batch-level forward and backward passes, for either batch layout. Both
// layouts compute the same function of the parameters; only the plumbing
// differs (padded blocks with masks vs deduplicated rows with index
// segments), which is what makes them interchangeable and testable against
// each other.
//
// Relevance score between a user and a candidate is the dot product of their
// vectors; the topic variant adds the dot product of their topic mixtures
// (the user mixture is the mean of the history news mixtures).

namespace newsrec::model {

// scores(b, c) = user b . candidate (b, c). cand_vecs is flat [B*C, dim].
template <class Real>
Matrix<Real> score(const Matrix<Real>& user_vecs, const Matrix<Real>& cand_vecs,
                   Index candidates) {
  const Index b_count = static_cast<Index>(user_vecs.rows());
  if (cand_vecs.rows() != b_count * candidates) {
    throw Error(cat("expected ", b_count * candidates, " candidate rows, got ",
                    cand_vecs.rows()));
  }
  Matrix<Real> scores(b_count, candidates);
  for (Index b = 0; b < b_count; ++b) {
    scores.row(b).noalias() =
        user_vecs.row(b) * cand_vecs.middleRows(b * candidates, candidates).transpose();
  }
  return scores;
}

// Mean over instances of -log softmax(scores row)[positive]. Throws Error
// on non-finite scores. Optionally returns the softmax rows.
template <class Real>
Real training_loss(const Matrix<Real>& scores, std::span<const Index> positives,
                   Matrix<Real>* probs_out = nullptr) {
  const Index b_count = static_cast<Index>(scores.rows());
  if (static_cast<Index>(positives.size()) != b_count) {
    throw Error(cat("expected ", b_count, " positive positions, got ", positives.size()));
  }
  if (!scores.allFinite()) throw Error("non-finite candidate scores");
  Matrix<Real> probs(scores.rows(), scores.cols());
  Real loss = Real(0);
  for (Index b = 0; b < b_count; ++b) {
    const Index positive = positives[static_cast<std::size_t>(b)];
    if (positive < 0 || positive >= scores.cols()) {
      throw Error(cat("positive position ", positive, " outside [0, ", scores.cols(), ")"));
    }
    const Real max_value = scores.row(b).maxCoeff();
    probs.row(b) = (scores.row(b).array() - max_value).exp();
    const Real sum = probs.row(b).sum();
    probs.row(b) /= sum;
    loss -= scores(b, positive) - max_value - std::log(sum);
  }
  loss /= static_cast<Real>(b_count);
  if (probs_out) *probs_out = std::move(probs);
  return loss;
}

template <class Real>
struct ForwardResult {
  Real loss = Real(0);
  Matrix<Real> scores;  // [B, 1+K]
};

// Everything backward() needs that forward() already computed. A trace is
// valid for exactly the (batch, params revision) pair it was built from.
template <class Real>
struct BatchTrace {
  const void* batch_id = nullptr;
  std::uint64_t params_revision = 0;
  bool is_concat = false;

  Matrix<Real> hist_vectors, hist_mixtures;      // zero-pad layout
  Matrix<Real> cand_vectors, cand_mixtures;      // zero-pad layout
  Matrix<Real> unique_vectors, unique_mixtures;  // concat layout

  UserEncodeTrace<Real> user;
  Matrix<Real> users;           // [B, model_dim]
  Matrix<Real> user_mixtures;   // [B, topics] (topic variant)
  Matrix<Real> probs;           // softmax rows of the scores
};

namespace detail {

template <class Real>
void check_trace(const BatchTrace<Real>& trace, const void* batch_id, bool is_concat,
                 const Params<Real>& params) {
  if (trace.batch_id != batch_id || trace.is_concat != is_concat) {
    throw Error("forward trace does not belong to this batch");
  }
  if (trace.params_revision != params.revision) {
    throw Error("stale forward trace: parameters changed since forward()");
  }
}

// d_scores(b, c) = (softmax - onehot(positive)) / B.
template <class Real>
Matrix<Real> loss_score_gradient(const Matrix<Real>& probs, std::span<const Index> positives) {
  Matrix<Real> d_scores = probs;
  const Index b_count = static_cast<Index>(probs.rows());
  for (Index b = 0; b < b_count; ++b) {
    d_scores(b, positives[static_cast<std::size_t>(b)]) -= Real(1);
  }
  d_scores /= static_cast<Real>(b_count);
  return d_scores;
}

}  // namespace detail

template <class Real>
ForwardResult<Real> forward(const batching::ZeroPadBatch& batch, const Params<Real>& params,
                            BatchTrace<Real>* trace) {
  const bool topic = params.config.variant == Variant::kTopicAttention;
  const Index b_count = batch.batch;
  const Index h_max = batch.history_max;
  const Index candidates = batch.candidates;

  NewsEncoding<Real> hist = encode_news<Real>(batch.history_tokens, params);
  NewsEncoding<Real> cand = encode_news<Real>(batch.candidate_tokens, params);

  UserEncodeTrace<Real>* user_trace = trace ? &trace->user : nullptr;
  Matrix<Real> users =
      encode_user_zero_pad(hist.vectors, h_max, batch.history_mask, params, user_trace);

  Matrix<Real> user_mixtures;
  if (topic) {
    user_mixtures = Matrix<Real>::Zero(b_count, params.config.topics);
    for (Index b = 0; b < b_count; ++b) {
      Index valid = 0;
      for (Index s = 0; s < h_max; ++s) {
        if (batch.history_mask(b, s) != 0) {
          user_mixtures.row(b) += hist.mixtures.row(b * h_max + s);
          ++valid;
        }
      }
      if (valid > 0) user_mixtures.row(b) /= static_cast<Real>(valid);
    }
  }

  ForwardResult<Real> result;
  result.scores = score(users, cand.vectors, candidates);
  if (topic) {
    for (Index b = 0; b < b_count; ++b) {
      for (Index c = 0; c < candidates; ++c) {
        result.scores(b, c) += user_mixtures.row(b).dot(cand.mixtures.row(b * candidates + c));
      }
    }
  }
  Matrix<Real> probs;
  result.loss = training_loss<Real>(result.scores, batch.labels, &probs);

  if (trace) {
    trace->batch_id = &batch;
    trace->params_revision = params.revision;
    trace->is_concat = false;
    trace->hist_vectors = std::move(hist.vectors);
    trace->hist_mixtures = std::move(hist.mixtures);
    trace->cand_vectors = std::move(cand.vectors);
    trace->cand_mixtures = std::move(cand.mixtures);
    trace->users = std::move(users);
    trace->user_mixtures = std::move(user_mixtures);
    trace->probs = std::move(probs);
  }
  return result;
}

template <class Real>
ForwardResult<Real> forward(const batching::ConcatBatch& batch, const Params<Real>& params,
                            BatchTrace<Real>* trace) {
  const bool topic = params.config.variant == Variant::kTopicAttention;
  const Index b_count = batch.batch;
  const Index candidates = batch.candidates;

  NewsEncoding<Real> unique = encode_news<Real>(batch.unique_tokens, params);

  UserEncodeTrace<Real>* user_trace = trace ? &trace->user : nullptr;
  Matrix<Real> users = encode_user_concat(unique.vectors, batch.history_index,
                                          batch.history_offsets, params, user_trace);

  Matrix<Real> cand_vectors(b_count * candidates, params.config.model_dim());
  for (Index b = 0; b < b_count; ++b) {
    for (Index c = 0; c < candidates; ++c) {
      cand_vectors.row(b * candidates + c) = unique.vectors.row(batch.candidate_index(b, c));
    }
  }

  Matrix<Real> user_mixtures;
  if (topic) {
    user_mixtures = Matrix<Real>::Zero(b_count, params.config.topics);
    for (Index b = 0; b < b_count; ++b) {
      const Index begin = batch.history_offsets[static_cast<std::size_t>(b)];
      const Index end = batch.history_offsets[static_cast<std::size_t>(b) + 1];
      for (Index t = begin; t < end; ++t) {
        user_mixtures.row(b) +=
            unique.mixtures.row(batch.history_index[static_cast<std::size_t>(t)]);
      }
      if (end > begin) user_mixtures.row(b) /= static_cast<Real>(end - begin);
    }
  }

  ForwardResult<Real> result;
  result.scores = score(users, cand_vectors, candidates);
  if (topic) {
    for (Index b = 0; b < b_count; ++b) {
      for (Index c = 0; c < candidates; ++c) {
        result.scores(b, c) += user_mixtures.row(b).dot(
            unique.mixtures.row(batch.candidate_index(b, c)));
      }
    }
  }
  Matrix<Real> probs;
  result.loss = training_loss<Real>(result.scores, batch.labels, &probs);

  if (trace) {
    trace->batch_id = &batch;
    trace->params_revision = params.revision;
    trace->is_concat = true;
    trace->unique_vectors = std::move(unique.vectors);
    trace->unique_mixtures = std::move(unique.mixtures);
    trace->users = std::move(users);
    trace->user_mixtures = std::move(user_mixtures);
    trace->probs = std::move(probs);
  }
  return result;
}

// Accumulates this batch's exact loss gradients into `grads` (typically
// zeroed by the caller). Throws Error when the trace is stale or belongs to
// a different batch.
template <class Real>
void backward(const batching::ZeroPadBatch& batch, const Params<Real>& params,
              const BatchTrace<Real>& trace, Gradients<Real>& grads) {
  detail::check_trace(trace, &batch, false, params);
  const bool topic = params.config.variant == Variant::kTopicAttention;
  const Index b_count = batch.batch;
  const Index h_max = batch.history_max;
  const Index candidates = batch.candidates;

  const Matrix<Real> d_scores = detail::loss_score_gradient<Real>(trace.probs, batch.labels);

  Matrix<Real> d_users = Matrix<Real>::Zero(b_count, params.config.model_dim());
  Matrix<Real> d_cand = Matrix<Real>(b_count * candidates, params.config.model_dim());
  for (Index b = 0; b < b_count; ++b) {
    for (Index c = 0; c < candidates; ++c) {
      const Real g = d_scores(b, c);
      d_users.row(b) += g * trace.cand_vectors.row(b * candidates + c);
      d_cand.row(b * candidates + c) = g * trace.users.row(b);
    }
  }

  Matrix<Real> d_user_mix, d_cand_mix, d_hist_mix;
  if (topic) {
    d_user_mix = Matrix<Real>::Zero(b_count, params.config.topics);
    d_cand_mix = Matrix<Real>(b_count * candidates, params.config.topics);
    for (Index b = 0; b < b_count; ++b) {
      for (Index c = 0; c < candidates; ++c) {
        const Real g = d_scores(b, c);
        d_user_mix.row(b) += g * trace.cand_mixtures.row(b * candidates + c);
        d_cand_mix.row(b * candidates + c) = g * trace.user_mixtures.row(b);
      }
    }
    d_hist_mix = Matrix<Real>::Zero(b_count * h_max, params.config.topics);
    for (Index b = 0; b < b_count; ++b) {
      Index valid = 0;
      for (Index s = 0; s < h_max; ++s) valid += batch.history_mask(b, s) != 0 ? 1 : 0;
      if (valid == 0) continue;
      const Real inv = Real(1) / static_cast<Real>(valid);
      for (Index s = 0; s < h_max; ++s) {
        if (batch.history_mask(b, s) != 0) {
          d_hist_mix.row(b * h_max + s) = d_user_mix.row(b) * inv;
        }
      }
    }
  }

  const Matrix<Real> d_hist_vecs = encode_user_zero_pad_backward(
      d_users, trace.hist_vectors, h_max, batch.history_mask, params, trace.user, grads);

  encode_news_backward<Real>(batch.history_tokens, d_hist_vecs, d_hist_mix, params, grads);
  encode_news_backward<Real>(batch.candidate_tokens, d_cand, d_cand_mix, params, grads);
}

template <class Real>
void backward(const batching::ConcatBatch& batch, const Params<Real>& params,
              const BatchTrace<Real>& trace, Gradients<Real>& grads) {
  detail::check_trace(trace, &batch, true, params);
  const bool topic = params.config.variant == Variant::kTopicAttention;
  const Index b_count = batch.batch;
  const Index candidates = batch.candidates;
  const Index unique_count = static_cast<Index>(trace.unique_vectors.rows());

  const Matrix<Real> d_scores = detail::loss_score_gradient<Real>(trace.probs, batch.labels);

  Matrix<Real> d_users = Matrix<Real>::Zero(b_count, params.config.model_dim());
  Matrix<Real> d_unique = Matrix<Real>::Zero(unique_count, params.config.model_dim());
  for (Index b = 0; b < b_count; ++b) {
    for (Index c = 0; c < candidates; ++c) {
      const Real g = d_scores(b, c);
      const Index u = batch.candidate_index(b, c);
      d_users.row(b) += g * trace.unique_vectors.row(u);
      d_unique.row(u) += g * trace.users.row(b);
    }
  }

  Matrix<Real> d_unique_mix;
  if (topic) {
    Matrix<Real> d_user_mix = Matrix<Real>::Zero(b_count, params.config.topics);
    d_unique_mix = Matrix<Real>::Zero(unique_count, params.config.topics);
    for (Index b = 0; b < b_count; ++b) {
      for (Index c = 0; c < candidates; ++c) {
        const Real g = d_scores(b, c);
        const Index u = batch.candidate_index(b, c);
        d_user_mix.row(b) += g * trace.unique_mixtures.row(u);
        d_unique_mix.row(u) += g * trace.user_mixtures.row(b);
      }
    }
    for (Index b = 0; b < b_count; ++b) {
      const Index begin = batch.history_offsets[static_cast<std::size_t>(b)];
      const Index end = batch.history_offsets[static_cast<std::size_t>(b) + 1];
      if (end == begin) continue;
      const Real inv = Real(1) / static_cast<Real>(end - begin);
      for (Index t = begin; t < end; ++t) {
        d_unique_mix.row(batch.history_index[static_cast<std::size_t>(t)]) +=
            d_user_mix.row(b) * inv;
      }
    }
  }

  encode_user_concat_backward(d_users, batch.history_index, batch.history_offsets, params,
                              trace.user, grads, d_unique);

  encode_news_backward<Real>(batch.unique_tokens, d_unique, d_unique_mix, params, grads);
}

// Layout-dispatching helpers.
template <class Real>
ForwardResult<Real> forward(const batching::Batch& batch, const Params<Real>& params,
                            BatchTrace<Real>* trace) {
  if (const auto* zero_pad = std::get_if<batching::ZeroPadBatch>(&batch)) {
    return forward(*zero_pad, params, trace);
  }
  return forward(std::get<batching::ConcatBatch>(batch), params, trace);
}

template <class Real>
void backward(const batching::Batch& batch, const Params<Real>& params,
              const BatchTrace<Real>& trace, Gradients<Real>& grads) {
  if (const auto* zero_pad = std::get_if<batching::ZeroPadBatch>(&batch)) {
    backward(*zero_pad, params, trace, grads);
    return;
  }
  backward(std::get<batching::ConcatBatch>(batch), params, trace, grads);
}

}  // namespace newsrec::model

#endif  // NEWSREC_MODEL_HPP_
