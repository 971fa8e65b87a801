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

#ifndef NEWSREC_ENCODERS_HPP_
#define NEWSREC_ENCODERS_HPP_

#include <span>

#include "newsrec/attention.hpp"
#include "newsrec/params.hpp"
#include "newsrec/types.hpp"

// News encoder: embed -> multi-head self-attention over words -> additive
// pooling, plus (topic variant) a word-level topic head. User encoders run
// the same attention/pool machinery over history news vectors, either as
// padded fixed-width sequences with a mask (zero-pad layout) or as ragged
// segments over deduplicated vectors (concat layout).
//
// The news encoder keeps no forward trace: its backward pass recomputes
// activations chunk by chunk, which bounds memory by the chunk size instead
// of the batch size.

namespace newsrec::model {

// News rows per chunk in encode_news / encode_news_backward.
inline constexpr Index kNewsChunk = 512;

// tokens: [n, l] vocabulary indices. Returns [n*l, embedding_dim] with one
// row per token position. Out-of-range indices raise Error.
template <class Real>
Matrix<Real> embed_tokens(const Eigen::Ref<const IntMatrix>& tokens,
                          const Matrix<Real>& embedding) {
  const Index n = static_cast<Index>(tokens.rows());
  const Index l = static_cast<Index>(tokens.cols());
  Matrix<Real> out(n * l, embedding.cols());
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < l; ++c) {
      const Index token = tokens(r, c);
      if (token < 0 || token >= embedding.rows()) {
        throw Error(cat("token index ", token, " outside vocabulary of size ",
                        embedding.rows()));
      }
      out.row(r * l + c) = embedding.row(token);
    }
  }
  return out;
}

inline ByteMatrix word_mask(const Eigen::Ref<const IntMatrix>& tokens) {
  return (tokens.array() != 0).cast<std::uint8_t>().matrix();
}

namespace detail {

// Row-wise softmax (no masking); every row sums to 1.
template <class Real>
void softmax_rows(Matrix<Real>& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const Real max_value = row.maxCoeff();
    row = (row.array() - max_value).exp();
    row /= row.sum();
  }
}

}  // namespace detail

// Per-word topic weights: softmax over topics of (topic_matrix . word) /
// temperature. Padding positions carry the zero embedding and therefore a
// uniform row; every row sums to 1.
template <class Real>
Matrix<Real> topic_word_weights(const Matrix<Real>& x, const Matrix<Real>& topic_matrix,
                                Real temperature) {
  Matrix<Real> logits(x.rows(), topic_matrix.rows());
  logits.noalias() = x * topic_matrix.transpose();
  logits /= temperature;
  detail::softmax_rows(logits);
  return logits;
}

template <class Real>
struct TopicAttentionResult {
  Matrix<Real> mixtures;      // [n, topics], rows sum to 1
  Matrix<Real> word_weights;  // [n*l, topics], rows sum to 1
};

// Word-level topic attention over token rows. A news topic mixture is the
// mean of its non-padding word weight rows; an all-padding news gets the
// uniform mixture.
template <class Real>
TopicAttentionResult<Real> topic_attention(const Eigen::Ref<const IntMatrix>& tokens,
                                           const Params<Real>& params) {
  if (params.config.variant != Variant::kTopicAttention) {
    throw Error("model has no topic head (variant is self_attn)");
  }
  const Index n = static_cast<Index>(tokens.rows());
  const Index l = static_cast<Index>(tokens.cols());
  const Index topics = params.config.topics;

  TopicAttentionResult<Real> result;
  Matrix<Real> x = embed_tokens(tokens, params.embedding);
  result.word_weights =
      topic_word_weights(x, params.topic_matrix, static_cast<Real>(params.config.temperature));
  result.mixtures.resize(n, topics);
  for (Index r = 0; r < n; ++r) {
    Index count = 0;
    result.mixtures.row(r).setZero();
    for (Index c = 0; c < l; ++c) {
      if (tokens(r, c) != 0) {
        result.mixtures.row(r) += result.word_weights.row(r * l + c);
        ++count;
      }
    }
    if (count > 0) {
      result.mixtures.row(r) /= static_cast<Real>(count);
    } else {
      result.mixtures.row(r).setConstant(Real(1) / static_cast<Real>(topics));
    }
  }
  return result;
}

template <class Real>
struct NewsEncoding {
  Matrix<Real> vectors;   // [n, model_dim]; all-padding rows are exact zero
  Matrix<Real> mixtures;  // [n, topics] for the topic variant, else 0x0
};

// Encodes token rows into news vectors (and topic mixtures for the topic
// variant), processing kNewsChunk rows at a time.
template <class Real>
NewsEncoding<Real> encode_news(const Eigen::Ref<const IntMatrix>& tokens,
                               const Params<Real>& params) {
  const Index n = static_cast<Index>(tokens.rows());
  const Index l = static_cast<Index>(tokens.cols());
  const bool topic = params.config.variant == Variant::kTopicAttention;

  NewsEncoding<Real> out;
  out.vectors.resize(n, params.config.model_dim());
  if (topic) out.mixtures.resize(n, params.config.topics);

  for (Index begin = 0; begin < n; begin += kNewsChunk) {
    const Index count = std::min<Index>(kNewsChunk, n - begin);
    const auto chunk = tokens.middleRows(begin, count);
    const Matrix<Real> x = embed_tokens<Real>(chunk, params.embedding);
    const ByteMatrix mask = word_mask(chunk);
    const std::vector<Segment> segments = rect_segments(count, l, &mask);
    const Matrix<Real> attended =
        mhsa_forward(x, segments, params.news_attention, params.config.heads);
    out.vectors.middleRows(begin, count) =
        additive_pool_forward(attended, segments, params.news_pool);
    if (topic) {
      const Matrix<Real> weights = topic_word_weights(
          x, params.topic_matrix, static_cast<Real>(params.config.temperature));
      for (Index r = 0; r < count; ++r) {
        Index valid = 0;
        auto mix = out.mixtures.row(begin + r);
        mix.setZero();
        for (Index c = 0; c < l; ++c) {
          if (chunk(r, c) != 0) {
            mix += weights.row(r * l + c);
            ++valid;
          }
        }
        if (valid > 0) {
          mix /= static_cast<Real>(valid);
        } else {
          mix.setConstant(Real(1) / static_cast<Real>(params.config.topics));
        }
      }
    }
  }
  return out;
}

// Backward of encode_news. d_vectors is [n, model_dim]; d_mixtures is either
// 0x0 or [n, topics]. Recomputes forward activations chunk by chunk and
// accumulates into grads (embedding rows only when train_embedding is set).
template <class Real>
void encode_news_backward(const Eigen::Ref<const IntMatrix>& tokens, const Matrix<Real>& d_vectors,
                          const Matrix<Real>& d_mixtures, const Params<Real>& params,
                          Gradients<Real>& grads) {
  const Index n = static_cast<Index>(tokens.rows());
  const Index l = static_cast<Index>(tokens.cols());
  const bool topic =
      params.config.variant == Variant::kTopicAttention && d_mixtures.size() > 0;
  if (d_vectors.rows() != n) {
    throw Error(cat("d_vectors has ", d_vectors.rows(), " rows, expected ", n));
  }

  for (Index begin = 0; begin < n; begin += kNewsChunk) {
    const Index count = std::min<Index>(kNewsChunk, n - begin);
    const auto chunk = tokens.middleRows(begin, count);
    const Matrix<Real> x = embed_tokens<Real>(chunk, params.embedding);
    const ByteMatrix mask = word_mask(chunk);
    const std::vector<Segment> segments = rect_segments(count, l, &mask);

    MhsaTrace<Real> mhsa_trace;
    const Matrix<Real> attended =
        mhsa_forward(x, segments, params.news_attention, params.config.heads, &mhsa_trace);
    PoolTrace<Real> pool_trace;
    additive_pool_forward(attended, segments, params.news_pool, &pool_trace);

    const Matrix<Real> d_attended =
        additive_pool_backward(Matrix<Real>(d_vectors.middleRows(begin, count)), attended,
                               segments, params.news_pool, pool_trace, grads.news_pool);
    Matrix<Real> dx = mhsa_backward(d_attended, x, segments, params.news_attention,
                                    params.config.heads, mhsa_trace, grads.news_attention);

    if (topic) {
      const Real tau = static_cast<Real>(params.config.temperature);
      Matrix<Real> weights = topic_word_weights(x, params.topic_matrix, tau);
      Matrix<Real> d_weights = Matrix<Real>::Zero(count * l, params.config.topics);
      for (Index r = 0; r < count; ++r) {
        Index valid = 0;
        for (Index c = 0; c < l; ++c) valid += chunk(r, c) != 0 ? 1 : 0;
        if (valid == 0) continue;  // uniform mixture is constant in the parameters
        const Real inv = Real(1) / static_cast<Real>(valid);
        for (Index c = 0; c < l; ++c) {
          if (chunk(r, c) != 0) {
            d_weights.row(r * l + c) = d_mixtures.row(begin + r) * inv;
          }
        }
      }
      // Softmax backward per word row, then through logits = x Theta^T / tau.
      Matrix<Real> d_logits(count * l, params.config.topics);
      for (Index r = 0; r < d_logits.rows(); ++r) {
        const Real dot = weights.row(r).dot(d_weights.row(r));
        d_logits.row(r) =
            weights.row(r).cwiseProduct((d_weights.row(r).array() - dot).matrix());
      }
      d_logits /= tau;
      grads.topic_matrix.noalias() += d_logits.transpose() * x;
      dx.noalias() += d_logits * params.topic_matrix;
    }

    if (params.config.train_embedding) {
      for (Index r = 0; r < count; ++r) {
        for (Index c = 0; c < l; ++c) {
          const Index token = chunk(r, c);
          if (token != 0) grads.embedding.row(token) += dx.row(r * l + c);
        }
      }
    }
  }
}

template <class Real>
struct UserEncodeTrace {
  MhsaTrace<Real> mhsa;
  PoolTrace<Real> pool;
  Matrix<Real> attended;  // self-attention output (pool input)
  Matrix<Real> gathered;  // concat layout only: history vectors, flat
};

// history_vecs: [count * history_max, model_dim] padded news vectors; mask
// marks real entries. Returns one user vector per sequence; a fully masked
// (empty) history gives the zero vector.
template <class Real>
Matrix<Real> encode_user_zero_pad(const Matrix<Real>& history_vecs, Index history_max,
                                  const ByteMatrix& mask, const Params<Real>& params,
                                  UserEncodeTrace<Real>* trace = nullptr) {
  const Index count = static_cast<Index>(mask.rows());
  if (history_vecs.rows() != count * history_max) {
    throw Error(cat("expected ", count * history_max, " history rows, got ",
                    history_vecs.rows()));
  }
  const std::vector<Segment> segments = rect_segments(count, history_max, &mask);
  Matrix<Real> attended = mhsa_forward(history_vecs, segments, params.user_attention,
                                       params.config.heads, trace ? &trace->mhsa : nullptr);
  Matrix<Real> users = additive_pool_forward(attended, segments, params.user_pool,
                                             trace ? &trace->pool : nullptr);
  if (trace) trace->attended = std::move(attended);
  return users;
}

// Backward of encode_user_zero_pad; returns the gradient w.r.t. the padded
// history vectors (zero rows at masked slots).
template <class Real>
Matrix<Real> encode_user_zero_pad_backward(const Matrix<Real>& d_users,
                                           const Matrix<Real>& history_vecs, Index history_max,
                                           const ByteMatrix& mask, const Params<Real>& params,
                                           const UserEncodeTrace<Real>& trace,
                                           Gradients<Real>& grads) {
  const Index count = static_cast<Index>(mask.rows());
  const std::vector<Segment> segments = rect_segments(count, history_max, &mask);
  const Matrix<Real> d_attended = additive_pool_backward(
      d_users, trace.attended, segments, params.user_pool, trace.pool, grads.user_pool);
  return mhsa_backward(d_attended, history_vecs, segments, params.user_attention,
                       params.config.heads, trace.mhsa, grads.user_attention);
}

// Ragged user encoder over deduplicated news vectors. history_index holds
// references into unique_vecs; offsets[b]..offsets[b+1] delimit user b.
// An empty segment gives the zero vector.
template <class Real>
Matrix<Real> encode_user_concat(const Matrix<Real>& unique_vecs,
                                std::span<const Index> history_index,
                                std::span<const Index> offsets, const Params<Real>& params,
                                UserEncodeTrace<Real>* trace = nullptr) {
  const Index total = static_cast<Index>(history_index.size());
  Matrix<Real> gathered(total, unique_vecs.cols());
  for (Index t = 0; t < total; ++t) {
    const Index u = history_index[static_cast<std::size_t>(t)];
    if (u < 0 || u >= unique_vecs.rows()) {
      throw Error(cat("history index ", u, " outside unique rows ", unique_vecs.rows()));
    }
    gathered.row(t) = unique_vecs.row(u);
  }
  const std::vector<Segment> segments = ragged_segments(offsets);
  Matrix<Real> attended = mhsa_forward(gathered, segments, params.user_attention,
                                       params.config.heads, trace ? &trace->mhsa : nullptr);
  Matrix<Real> users = additive_pool_forward(attended, segments, params.user_pool,
                                             trace ? &trace->pool : nullptr);
  if (trace) {
    trace->attended = std::move(attended);
    trace->gathered = std::move(gathered);
  }
  return users;
}

// Backward of encode_user_concat; scatter-adds the gradient w.r.t. the
// referenced rows into d_unique_vecs.
template <class Real>
void encode_user_concat_backward(const Matrix<Real>& d_users,
                                 std::span<const Index> history_index,
                                 std::span<const Index> offsets, const Params<Real>& params,
                                 const UserEncodeTrace<Real>& trace, Gradients<Real>& grads,
                                 Matrix<Real>& d_unique_vecs) {
  const std::vector<Segment> segments = ragged_segments(offsets);
  const Matrix<Real> d_attended = additive_pool_backward(
      d_users, trace.attended, segments, params.user_pool, trace.pool, grads.user_pool);
  const Matrix<Real> d_gathered =
      mhsa_backward(d_attended, trace.gathered, segments, params.user_attention,
                    params.config.heads, trace.mhsa, grads.user_attention);
  for (Index t = 0; t < d_gathered.rows(); ++t) {
    d_unique_vecs.row(history_index[static_cast<std::size_t>(t)]) += d_gathered.row(t);
  }
}

}  // namespace newsrec::model

#endif  // NEWSREC_ENCODERS_HPP_
