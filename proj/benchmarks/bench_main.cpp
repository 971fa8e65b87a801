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

// Microbenchmarks for the hot paths: batch construction, the news encoder,
// and full forward/backward passes under both batch layouts. History lengths
// are skewed the way click logs are (most users short, a long tail), which
// is exactly the regime where the concat layout pays off.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "newsrec/batching.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/model.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/types.hpp"

namespace {

using namespace newsrec;

constexpr Index kVocab = 4000;
constexpr Index kTitle = 20;
constexpr Index kNewsRows = 2000;
constexpr Index kHistoryMax = 50;
constexpr Index kNegatives = 4;

struct World {
  data::FeatureMatrix features;
  std::vector<batching::TrainingInstance> instances;
  batching::BatchPlan plan;
  model::Params<float> self_params;
  model::Params<float> topic_params;

  World()
      : features(make_features()),
        instances(make_instances()),
        plan(make_plan()),
        self_params(model::Params<float>::random_init(make_config(false), Rng(91))),
        topic_params(model::Params<float>::random_init(make_config(true), Rng(92))) {}

  static model::ModelConfig make_config(bool topic) {
    model::ModelConfig config;
    config.vocab_size = kVocab;
    config.embedding_dim = 64;
    config.heads = 4;
    config.head_dim = 16;
    config.attention_dim = 64;
    config.topics = 16;
    config.variant = topic ? model::Variant::kTopicAttention : model::Variant::kSelfAttention;
    return config;
  }

  static data::FeatureMatrix make_features() {
    Rng rng(90);
    IntMatrix tokens = IntMatrix::Zero(kNewsRows, kTitle);
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(kNewsRows));
    for (Index r = 0; r < kNewsRows; ++r) {
      ids.push_back(cat("news", r));
      if (r == 0) continue;
      const Index length = 4 + rng.index_below(kTitle - 3);
      for (Index c = 0; c < length; ++c) tokens(r, c) = 2 + rng.index_below(kVocab - 2);
    }
    return data::FeatureMatrix::from_rows(tokens, ids, kTitle, 0, false);
  }

  static std::vector<batching::TrainingInstance> make_instances() {
    Rng rng(93);
    std::vector<batching::TrainingInstance> instances(1024);
    for (auto& instance : instances) {
      const Index hist = 1 + rng.index_below(kHistoryMax);
      for (Index s = 0; s < hist; ++s) {
        instance.history.push_back(1 + rng.index_below(kNewsRows - 1));
      }
      instance.candidates.resize(static_cast<std::size_t>(1 + kNegatives));
      for (auto& row : instance.candidates) row = 1 + rng.index_below(kNewsRows - 1);
      instance.positive_position = rng.index_below(1 + kNegatives);
    }
    return instances;
  }

  static batching::BatchPlan make_plan() {
    batching::BatchPlan plan;
    plan.batch_size = 32;
    plan.negatives = kNegatives;
    plan.history_max = kHistoryMax;
    plan.shuffle = false;
    return plan;
  }

  std::span<const batching::TrainingInstance> slice() const {
    return {instances.data(), static_cast<std::size_t>(plan.batch_size)};
  }
};

const World& world() {
  static const World instance;
  return instance;
}

void BM_BuildZeroPadBatch(benchmark::State& state) {
  const World& w = world();
  for (auto _ : state) {
    auto batch = batching::build_zero_pad_batch(w.slice(), w.features, w.plan);
    benchmark::DoNotOptimize(batch.history_tokens.data());
  }
  state.SetItemsProcessed(state.iterations() * w.plan.batch_size);
}
BENCHMARK(BM_BuildZeroPadBatch);

void BM_BuildConcatBatch(benchmark::State& state) {
  const World& w = world();
  for (auto _ : state) {
    auto batch = batching::build_concat_batch(w.slice(), w.features, w.plan);
    benchmark::DoNotOptimize(batch.unique_tokens.data());
  }
  state.SetItemsProcessed(state.iterations() * w.plan.batch_size);
}
BENCHMARK(BM_BuildConcatBatch);

void BM_EncodeNews(benchmark::State& state) {
  const World& w = world();
  const auto& params = state.range(0) == 1 ? w.topic_params : w.self_params;
  const IntMatrix block = w.features.tokens().topRows(256);
  for (auto _ : state) {
    auto encoded = model::encode_news<float>(block, params);
    benchmark::DoNotOptimize(encoded.vectors.data());
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_EncodeNews)->Arg(0)->Arg(1)->ArgName("topic");

void BM_ForwardZeroPad(benchmark::State& state) {
  const World& w = world();
  const auto batch = batching::build_zero_pad_batch(w.slice(), w.features, w.plan);
  for (auto _ : state) {
    auto out = model::forward(batch, w.self_params);
    benchmark::DoNotOptimize(out.loss);
  }
  state.SetItemsProcessed(state.iterations() * w.plan.batch_size);
}
BENCHMARK(BM_ForwardZeroPad);

void BM_ForwardConcat(benchmark::State& state) {
  const World& w = world();
  const auto batch = batching::build_concat_batch(w.slice(), w.features, w.plan);
  for (auto _ : state) {
    auto out = model::forward(batch, w.self_params);
    benchmark::DoNotOptimize(out.loss);
  }
  state.SetItemsProcessed(state.iterations() * w.plan.batch_size);
}
BENCHMARK(BM_ForwardConcat);

void BM_TrainStepZeroPad(benchmark::State& state) {
  const World& w = world();
  const auto batch = batching::build_zero_pad_batch(w.slice(), w.features, w.plan);
  model::Params<float> params = w.self_params;
  auto grads = model::Gradients<float>::zeros_like(params);
  for (auto _ : state) {
    model::BatchTrace<float> trace;
    auto out = model::forward(batch, params, &trace);
    grads.set_zero();
    model::backward(batch, params, trace, grads);
    benchmark::DoNotOptimize(out.loss);
  }
  state.SetItemsProcessed(state.iterations() * w.plan.batch_size);
}
BENCHMARK(BM_TrainStepZeroPad);

void BM_TrainStepConcat(benchmark::State& state) {
  const World& w = world();
  const auto batch = batching::build_concat_batch(w.slice(), w.features, w.plan);
  model::Params<float> params = w.self_params;
  auto grads = model::Gradients<float>::zeros_like(params);
  for (auto _ : state) {
    model::BatchTrace<float> trace;
    auto out = model::forward(batch, params, &trace);
    grads.set_zero();
    model::backward(batch, params, trace, grads);
    benchmark::DoNotOptimize(out.loss);
  }
  state.SetItemsProcessed(state.iterations() * w.plan.batch_size);
}
BENCHMARK(BM_TrainStepConcat);

}  // namespace

BENCHMARK_MAIN();
