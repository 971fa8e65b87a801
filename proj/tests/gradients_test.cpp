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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "newsrec/batching.hpp"
#include "newsrec/model.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/types.hpp"
#include "oracles.hpp"

using namespace newsrec;
using batching::BatchPlan;

namespace {

// Spot-checks analytic gradients against central differences on a sampled
// subset of entries per tensor (the exhaustive sweep lives in the acceptance
// suite). Loss is evaluated through the public forward() only.
void check_gradients(bool topic, bool concat) {
  const model::ModelConfig config = oracles::tiny_model_config(topic);
  Rng rng(topic ? 101 : 103);
  auto params = model::Params<double>::random_init(config, rng);
  const auto features = oracles::tiny_features(10, 4, rng, config.vocab_size);
  const auto instances = oracles::tiny_instances(5, features.rows(), 4, 2, rng);
  BatchPlan plan;
  plan.batch_size = 5;
  plan.negatives = 2;
  plan.history_max = 4;
  const batching::Batch batch =
      concat ? batching::Batch(batching::build_concat_batch(instances, features, plan))
             : batching::Batch(batching::build_zero_pad_batch(instances, features, plan));

  model::BatchTrace<double> trace;
  model::forward<double>(batch, params, &trace);
  auto grads = model::Gradients<double>::zeros_like(params);
  model::backward<double>(batch, params, trace, grads);

  const double epsilon = 1e-5;
  const auto param_refs = params.registry();
  const auto grad_refs = grads.registry();
  REQUIRE(param_refs.size() == grad_refs.size());

  Rng pick(55);
  for (std::size_t t = 0; t < param_refs.size(); ++t) {
    Matrix<double>& tensor = *param_refs[t].tensor;
    const Matrix<double>& grad = *grad_refs[t].tensor;
    REQUIRE(grad.rows() == tensor.rows());
    REQUIRE(grad.cols() == tensor.cols());
    const Index entries = static_cast<Index>(tensor.size());
    const Index samples = std::min<Index>(6, entries);
    for (Index s = 0; s < samples; ++s) {
      const Index flat = pick.index_below(entries);
      const Index r = flat / tensor.cols();
      const Index c = flat % tensor.cols();
      const double saved = tensor(r, c);
      tensor(r, c) = saved + epsilon;
      params.revision += 1;
      const double up = model::forward<double>(batch, params, nullptr).loss;
      tensor(r, c) = saved - epsilon;
      params.revision += 1;
      const double down = model::forward<double>(batch, params, nullptr).loss;
      tensor(r, c) = saved;
      params.revision += 1;
      const double numeric = (up - down) / (2 * epsilon);
      const double analytic = grad(r, c);
      const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic)});
      CAPTURE(param_refs[t].name);
      CAPTURE(flat);
      CHECK(std::abs(numeric - analytic) / scale <= 1e-6);
    }
  }
}

}  // namespace

TEST_SUITE("gradients") {

TEST_CASE("self-attention variant matches finite differences (zero-pad)") {
  check_gradients(false, false);
}

TEST_CASE("self-attention variant matches finite differences (concat)") {
  check_gradients(false, true);
}

TEST_CASE("topic variant matches finite differences (zero-pad)") {
  check_gradients(true, false);
}

TEST_CASE("topic variant matches finite differences (concat)") {
  check_gradients(true, true);
}

TEST_CASE("embedding row zero receives no update path") {
  // The null/padding row is excluded from every forward read that matters:
  // its gradient must be exactly zero so no optimizer step can move it.
  const model::ModelConfig config = oracles::tiny_model_config(true);
  Rng rng(107);
  auto params = model::Params<double>::random_init(config, rng);
  const auto features = oracles::tiny_features(8, 4, rng, config.vocab_size);
  const auto instances = oracles::tiny_instances(4, features.rows(), 4, 2, rng);
  BatchPlan plan;
  plan.batch_size = 4;
  plan.negatives = 2;
  plan.history_max = 4;
  const auto batch = batching::build_zero_pad_batch(instances, features, plan);
  model::BatchTrace<double> trace;
  model::forward<double>(batch, params, &trace);
  auto grads = model::Gradients<double>::zeros_like(params);
  model::backward<double>(batch, params, trace, grads);
  CHECK(grads.embedding.row(0).isZero(0.0));
}

}  // TEST_SUITE
