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

#ifndef NEWSREC_PARAMS_HPP_
#define NEWSREC_PARAMS_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "newsrec/data_ingest.hpp"
#include "newsrec/model_config.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/types.hpp"

namespace newsrec::model {

template <class Real>
struct AttentionParams {
  Matrix<Real> query;   // [in_dim, model_dim]
  Matrix<Real> key;     // [in_dim, model_dim]
  Matrix<Real> value;   // [in_dim, model_dim]
  Matrix<Real> output;  // [model_dim, model_dim]
};

template <class Real>
struct PoolParams {
  Matrix<Real> weight;  // [attention_dim, model_dim]
  Matrix<Real> bias;    // [1, attention_dim]
  Matrix<Real> vector;  // [1, attention_dim]
};

template <class Real>
struct TensorRef {
  std::string name;
  Matrix<Real>* tensor;
  bool trainable;
};

template <class Real>
struct ConstTensorRef {
  std::string name;
  const Matrix<Real>* tensor;
  bool trainable;
};

namespace detail {

template <class Real, class Ref, class Group>
void append_attention_refs(std::vector<Ref>& out, const std::string& prefix, Group& group) {
  out.push_back({prefix + ".query", &group.query, true});
  out.push_back({prefix + ".key", &group.key, true});
  out.push_back({prefix + ".value", &group.value, true});
  out.push_back({prefix + ".output", &group.output, true});
}

template <class Real, class Ref, class Group>
void append_pool_refs(std::vector<Ref>& out, const std::string& prefix, Group& group) {
  out.push_back({prefix + ".weight", &group.weight, true});
  out.push_back({prefix + ".bias", &group.bias, true});
  out.push_back({prefix + ".vector", &group.vector, true});
}

template <class Real, class Ref, class Container>
std::vector<Ref> build_registry(Container& c, const ModelConfig& config) {
  std::vector<Ref> out;
  out.push_back({"embedding", &c.embedding, config.train_embedding});
  append_attention_refs<Real, Ref>(out, "news_attention", c.news_attention);
  append_pool_refs<Real, Ref>(out, "news_pool", c.news_pool);
  append_attention_refs<Real, Ref>(out, "user_attention", c.user_attention);
  append_pool_refs<Real, Ref>(out, "user_pool", c.user_pool);
  if (config.variant == Variant::kTopicAttention) {
    out.push_back({"topic.matrix", &c.topic_matrix, true});
  }
  return out;
}

template <class Real>
void fill_uniform(Matrix<Real>& m, Rng& rng, double lo, double hi) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = static_cast<Real>(rng.uniform(lo, hi));
  }
}

template <class Real>
void fill_glorot(Matrix<Real>& m, Rng& rng, Index fan_in, Index fan_out) {
  const double limit = std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
  fill_uniform(m, rng, -limit, limit);
}

}  // namespace detail

// All trainable state of one model. The registry walks every tensor in a
// fixed order; optimizer slots, checkpoints and gradient containers align by
// that order.
template <class Real>
struct Params {
  ModelConfig config;
  Matrix<Real> embedding;  // [vocab_size, embedding_dim], row 0 fixed to zero
  AttentionParams<Real> news_attention;
  PoolParams<Real> news_pool;
  AttentionParams<Real> user_attention;
  PoolParams<Real> user_pool;
  Matrix<Real> topic_matrix;  // [topics, embedding_dim] (topic variant, else 0x0)

  // Bumped on every in-place update; lets cached forward traces detect
  // staleness before a backward pass.
  std::uint64_t revision = 0;

  std::vector<TensorRef<Real>> registry() {
    return detail::build_registry<Real, TensorRef<Real>>(*this, config);
  }
  std::vector<ConstTensorRef<Real>> registry() const {
    return detail::build_registry<Real, ConstTensorRef<Real>>(*this, config);
  }

  // Fresh parameters drawn from `rng` in registry order: embeddings and the
  // topic matrix uniform in [-0.1, 0.1], projection matrices Glorot-uniform,
  // biases zero. Embedding row 0 (padding) is zeroed.
  static Params random_init(const ModelConfig& config, Rng rng) {
    config.validate();
    Params p;
    p.config = config;
    const Index dm = config.model_dim();
    p.embedding.resize(config.vocab_size, config.embedding_dim);
    detail::fill_uniform(p.embedding, rng, -0.1, 0.1);
    p.embedding.row(0).setZero();

    const auto init_attention = [&](AttentionParams<Real>& a, Index in_dim) {
      a.query.resize(in_dim, dm);
      detail::fill_glorot(a.query, rng, in_dim, dm);
      a.key.resize(in_dim, dm);
      detail::fill_glorot(a.key, rng, in_dim, dm);
      a.value.resize(in_dim, dm);
      detail::fill_glorot(a.value, rng, in_dim, dm);
      a.output.resize(dm, dm);
      detail::fill_glorot(a.output, rng, dm, dm);
    };
    const auto init_pool = [&](PoolParams<Real>& pool) {
      pool.weight.resize(config.attention_dim, dm);
      detail::fill_glorot(pool.weight, rng, dm, config.attention_dim);
      pool.bias = Matrix<Real>::Zero(1, config.attention_dim);
      pool.vector.resize(1, config.attention_dim);
      detail::fill_glorot(pool.vector, rng, config.attention_dim, 1);
    };

    init_attention(p.news_attention, config.embedding_dim);
    init_pool(p.news_pool);
    init_attention(p.user_attention, dm);
    init_pool(p.user_pool);
    if (config.variant == Variant::kTopicAttention) {
      p.topic_matrix.resize(config.topics, config.embedding_dim);
      detail::fill_uniform(p.topic_matrix, rng, -0.1, 0.1);
    } else {
      p.topic_matrix.resize(0, 0);
    }
    return p;
  }

  // All-zero tensors of the right shapes; used when deserializing.
  static Params zeros(const ModelConfig& config) {
    config.validate();
    Params p;
    p.config = config;
    const Index dm = config.model_dim();
    p.embedding = Matrix<Real>::Zero(config.vocab_size, config.embedding_dim);
    const auto zero_attention = [&](AttentionParams<Real>& a, Index in_dim) {
      a.query = Matrix<Real>::Zero(in_dim, dm);
      a.key = Matrix<Real>::Zero(in_dim, dm);
      a.value = Matrix<Real>::Zero(in_dim, dm);
      a.output = Matrix<Real>::Zero(dm, dm);
    };
    const auto zero_pool = [&](PoolParams<Real>& pool) {
      pool.weight = Matrix<Real>::Zero(config.attention_dim, dm);
      pool.bias = Matrix<Real>::Zero(1, config.attention_dim);
      pool.vector = Matrix<Real>::Zero(1, config.attention_dim);
    };
    zero_attention(p.news_attention, config.embedding_dim);
    zero_pool(p.news_pool);
    zero_attention(p.user_attention, dm);
    zero_pool(p.user_pool);
    if (config.variant == Variant::kTopicAttention) {
      p.topic_matrix = Matrix<Real>::Zero(config.topics, config.embedding_dim);
    }
    return p;
  }

  // Replaces the embedding table with pretrained vectors (f32 artifacts).
  void set_embeddings(const data::EmbeddingMatrix& table) {
    if (table.rows() != config.vocab_size || table.cols() != config.embedding_dim) {
      throw Error(cat("embedding table is ", table.rows(), "x", table.cols(), ", model expects ",
                      config.vocab_size, "x", config.embedding_dim));
    }
    embedding = table.template cast<Real>();
    embedding.row(0).setZero();
  }

  template <class Other>
  Params<Other> cast() const {
    Params<Other> out;
    out.config = config;
    out.embedding = embedding.template cast<Other>();
    out.news_attention.query = news_attention.query.template cast<Other>();
    out.news_attention.key = news_attention.key.template cast<Other>();
    out.news_attention.value = news_attention.value.template cast<Other>();
    out.news_attention.output = news_attention.output.template cast<Other>();
    out.news_pool.weight = news_pool.weight.template cast<Other>();
    out.news_pool.bias = news_pool.bias.template cast<Other>();
    out.news_pool.vector = news_pool.vector.template cast<Other>();
    out.user_attention.query = user_attention.query.template cast<Other>();
    out.user_attention.key = user_attention.key.template cast<Other>();
    out.user_attention.value = user_attention.value.template cast<Other>();
    out.user_attention.output = user_attention.output.template cast<Other>();
    out.user_pool.weight = user_pool.weight.template cast<Other>();
    out.user_pool.bias = user_pool.bias.template cast<Other>();
    out.user_pool.vector = user_pool.vector.template cast<Other>();
    out.topic_matrix = topic_matrix.template cast<Other>();
    return out;
  }
};

// Gradient accumulator mirroring Params tensor-for-tensor.
template <class Real>
struct Gradients {
  ModelConfig config;
  Matrix<Real> embedding;
  AttentionParams<Real> news_attention;
  PoolParams<Real> news_pool;
  AttentionParams<Real> user_attention;
  PoolParams<Real> user_pool;
  Matrix<Real> topic_matrix;

  std::vector<TensorRef<Real>> registry() {
    return detail::build_registry<Real, TensorRef<Real>>(*this, config);
  }
  std::vector<ConstTensorRef<Real>> registry() const {
    return detail::build_registry<Real, ConstTensorRef<Real>>(*this, config);
  }

  static Gradients zeros_like(const Params<Real>& params) {
    Gradients g;
    g.config = params.config;
    const auto src = params.registry();
    auto dst = g.registry();
    for (std::size_t i = 0; i < src.size(); ++i) {
      *dst[i].tensor = Matrix<Real>::Zero(src[i].tensor->rows(), src[i].tensor->cols());
    }
    return g;
  }

  void set_zero() {
    for (auto& ref : registry()) ref.tensor->setZero();
  }
};

}  // namespace newsrec::model

#endif  // NEWSREC_PARAMS_HPP_
