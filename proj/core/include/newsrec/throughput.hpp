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

#ifndef NEWSREC_THROUGHPUT_HPP_
#define NEWSREC_THROUGHPUT_HPP_

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "newsrec/batching.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/evaluator.hpp"
#include "newsrec/model.hpp"
#include "newsrec/optimizer.hpp"
#include "newsrec/types.hpp"

// Samples-per-second measurement of the two batch layouts. The train phase
// times batch construction + forward + backward + Adam update; the eval
// phase times batch construction + forward scoring only, with the
// news-vector cache active for the concat layout (each distinct news is
// encoded once across the whole phase, warmup included). Both layouts see
// the identical instance stream for a given plan seed. Timed regions cycle
// the stream when it runs out.

namespace newsrec::eval {

struct ThroughputOptions {
  batching::BatchPlan plan;
  batching::Layout layout = batching::Layout::kConcat;
  int warmup_batches = 10;
  int measured_batches = 50;
};

struct PhaseTiming {
  double seconds = 0;
  std::size_t samples = 0;  // instances in the measured batches
  double per_second = 0;    // samples / seconds
};

struct ThroughputReport {
  std::string layout;
  PhaseTiming train;
  PhaseTiming eval;
  std::string hardware;        // cpu, compiler, parallelism degree
  double score_checksum = 0;   // sum of eval-phase scores; keeps work observable
};

// (fast / slow - 1) * 100.
double improvement_percent(double fast, double slow);

// Single-threaded run environment note for the report.
std::string hardware_summary();

// Published reference figures quoted alongside desk-scale results.
std::vector<std::string> reference_context();

// key=value lines, one per field, plus the reference context.
std::string render_throughput(const ThroughputReport& report);
// One-line machine-readable record.
std::string throughput_machine_line(const ThroughputReport& report);

namespace detail {

// Forward scores for one batch the way an evaluation pass computes them.
// The concat layout reuses `cache` across calls; the zero-pad layout
// re-encodes everything it touches.
template <class Real>
double eval_scores_checksum(const batching::Batch& batch, const model::Params<Real>& params,
                            const data::FeatureMatrix& features, NewsVectorCache<Real>& cache) {
  const bool topic = params.config.variant == model::Variant::kTopicAttention;
  Matrix<Real> scores;

  if (const auto* zp = std::get_if<batching::ZeroPadBatch>(&batch)) {
    const model::NewsEncoding<Real> hist = model::encode_news<Real>(zp->history_tokens, params);
    const model::NewsEncoding<Real> cand = model::encode_news<Real>(zp->candidate_tokens, params);
    const Matrix<Real> users =
        model::encode_user_zero_pad(hist.vectors, zp->history_max, zp->history_mask, params);
    scores = model::score(users, cand.vectors, zp->candidates);
    if (topic) {
      for (Index b = 0; b < zp->batch; ++b) {
        Matrix<Real> user_mix = Matrix<Real>::Zero(1, params.config.topics);
        Index valid = 0;
        for (Index h = 0; h < zp->history_max; ++h) {
          if (zp->history_mask(b, h)) {
            user_mix += hist.mixtures.row(b * zp->history_max + h);
            ++valid;
          }
        }
        if (valid > 0) user_mix /= static_cast<Real>(valid);
        for (Index c = 0; c < zp->candidates; ++c) {
          scores(b, c) += (user_mix.array() * cand.mixtures.row(b * zp->candidates + c).array()).sum();
        }
      }
    }
  } else {
    const auto& cb = std::get<batching::ConcatBatch>(batch);
    cache.require(features, params, cb.unique_rows);
    // Batch-local unique slots -> cache slots.
    std::vector<Index> cache_slot(cb.unique_rows.size());
    for (std::size_t u = 0; u < cb.unique_rows.size(); ++u) {
      cache_slot[u] = cache.slot(cb.unique_rows[u]);
    }
    std::vector<Index> history_index(cb.history_index.size());
    for (std::size_t t = 0; t < cb.history_index.size(); ++t) {
      history_index[t] = cache_slot[static_cast<std::size_t>(cb.history_index[t])];
    }
    const Matrix<Real> users = model::encode_user_concat(cache.vectors(), history_index,
                                                         cb.history_offsets, params);
    scores.resize(cb.batch, cb.candidates);
    Matrix<Real> user_mix;
    for (Index b = 0; b < cb.batch; ++b) {
      if (topic) {
        user_mix = Matrix<Real>::Zero(1, params.config.topics);
        const Index begin = cb.history_offsets[static_cast<std::size_t>(b)];
        const Index end = cb.history_offsets[static_cast<std::size_t>(b) + 1];
        for (Index t = begin; t < end; ++t) {
          user_mix += cache.mixtures().row(history_index[static_cast<std::size_t>(t)]);
        }
        if (end > begin) user_mix /= static_cast<Real>(end - begin);
      }
      for (Index c = 0; c < cb.candidates; ++c) {
        const Index slot = cache_slot[static_cast<std::size_t>(cb.candidate_index(b, c))];
        Real value = (users.row(b).array() * cache.vectors().row(slot).array()).sum();
        if (topic) value += (user_mix.array() * cache.mixtures().row(slot).array()).sum();
        scores(b, c) = value;
      }
    }
  }
  return static_cast<double>(scores.sum());
}

}  // namespace detail

template <class Real>
ThroughputReport measure_throughput(const model::Params<Real>& params,
                                    const std::vector<batching::TrainingInstance>& instances,
                                    const data::FeatureMatrix& features,
                                    const ThroughputOptions& options) {
  if (options.measured_batches < 1) {
    throw Error(cat("measured_batches must be >= 1, got ", options.measured_batches));
  }
  if (options.warmup_batches < 0) {
    throw Error(cat("warmup_batches must be >= 0, got ", options.warmup_batches));
  }
  if (instances.empty()) throw Error("throughput measurement needs instances");

  using Clock = std::chrono::steady_clock;
  ThroughputReport report;
  report.layout = batching::layout_name(options.layout);
  report.hardware = hardware_summary();

  // Train phase: mutate a private copy of the parameters.
  {
    model::Params<Real> working = params;
    train::OptimizerState<Real> optimizer = train::OptimizerState<Real>::init(working);
    model::Gradients<Real> grads = model::Gradients<Real>::zeros_like(working);
    batching::BatchStream stream(instances, features, options.plan, options.layout);

    const auto step = [&]() -> std::size_t {
      if (stream.done()) stream.reset();
      const batching::Batch batch = stream.next();
      model::BatchTrace<Real> trace;
      model::forward(batch, working, &trace);
      grads.set_zero();
      model::backward(batch, working, trace, grads);
      train::adam_step(working, grads, optimizer);
      return std::visit([](const auto& b) { return static_cast<std::size_t>(b.batch); }, batch);
    };

    for (int i = 0; i < options.warmup_batches; ++i) step();
    const auto start = Clock::now();
    for (int i = 0; i < options.measured_batches; ++i) report.train.samples += step();
    report.train.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.train.per_second =
        static_cast<double>(report.train.samples) / report.train.seconds;
  }

  // Eval phase: forward scoring only; the cache outlives warmup.
  {
    batching::BatchStream stream(instances, features, options.plan, options.layout);
    NewsVectorCache<Real> cache;

    const auto step = [&]() -> std::size_t {
      if (stream.done()) stream.reset();
      const batching::Batch batch = stream.next();
      report.score_checksum += detail::eval_scores_checksum(batch, params, features, cache);
      return std::visit([](const auto& b) { return static_cast<std::size_t>(b.batch); }, batch);
    };

    for (int i = 0; i < options.warmup_batches; ++i) step();
    const auto start = Clock::now();
    for (int i = 0; i < options.measured_batches; ++i) report.eval.samples += step();
    report.eval.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.eval.per_second = static_cast<double>(report.eval.samples) / report.eval.seconds;
  }
  return report;
}

}  // namespace newsrec::eval

#endif  // NEWSREC_THROUGHPUT_HPP_
