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
#include <string>
#include <vector>

#include "doctest.h"
#include "newsrec/evaluator.hpp"
#include "newsrec/metrics.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/types.hpp"
#include "oracles.hpp"

using namespace newsrec;
using doctest::Approx;

namespace {

data::ImpressionRecord make_impression(const std::string& id,
                                       std::vector<std::string> history,
                                       std::vector<data::CandidateLabel> candidates) {
  data::ImpressionRecord record;
  record.impression_id = id;
  record.user_id = "U_" + id;
  record.history = std::move(history);
  record.candidates = std::move(candidates);
  return record;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("auc hand examples") {
  CHECK(eval::auc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) == 1.0);
  CHECK(eval::auc(std::vector<double>{0.3, 0.7, 0.5}, std::vector<int>{1, 0, 0}) == 0.0);
  CHECK(eval::auc(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}) == 0.5);
  // Mixed: positive above one negative, tied with another.
  CHECK(eval::auc(std::vector<double>{0.5, 0.5, 0.1}, std::vector<int>{1, 0, 0}) == 0.75);
}

TEST_CASE("mrr hand examples") {
  CHECK(eval::mrr(std::vector<double>{0.9, 0.2}, std::vector<int>{1, 0}) == 1.0);
  CHECK(eval::mrr(std::vector<double>{0.9, 0.5, 0.2}, std::vector<int>{0, 1, 0}) == 0.5);
  // Two positives at ranks 1 and 3.
  CHECK(eval::mrr(std::vector<double>{0.9, 0.5, 0.2}, std::vector<int>{1, 0, 1}) ==
        Approx((1.0 + 1.0 / 3.0) / 2.0).epsilon(1e-15));
  // Ties keep the original candidate order.
  CHECK(eval::mrr(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}) == 0.5);
  CHECK(eval::mrr(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}) == 1.0);
}

TEST_CASE("ndcg hand examples") {
  CHECK(eval::ndcg_at_k(std::vector<double>{0.9, 0.2}, std::vector<int>{1, 0}, 5) == 1.0);
  // Single positive at rank 3 with k=5: (1/log2 4) / (1/log2 2).
  CHECK(eval::ndcg_at_k(std::vector<double>{0.9, 0.5, 0.2}, std::vector<int>{0, 0, 1}, 5) == 0.5);
  // Positive outside the cutoff.
  CHECK(eval::ndcg_at_k(std::vector<double>{0.9, 0.8, 0.7, 0.6, 0.5, 0.1},
                        std::vector<int>{0, 0, 0, 0, 0, 1}, 5) == 0.0);
  // Two positives, k below the positive count bounds the ideal.
  const double got = eval::ndcg_at_k(std::vector<double>{0.9, 0.8, 0.7},
                                     std::vector<int>{1, 0, 1}, 2);
  CHECK(got == Approx(1.0 / (1.0 + 1.0 / std::log2(3.0))).epsilon(1e-15));
}

TEST_CASE("metrics match the brute-force references on random impressions") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto imp = oracles::random_impression(rng, 2, 30, trial % 2 == 0);
    CAPTURE(trial);
    CHECK(eval::auc(imp.scores, imp.labels) ==
          Approx(oracles::auc_by_pairs(imp.scores, imp.labels)).epsilon(1e-12));
    CHECK(eval::mrr(imp.scores, imp.labels) ==
          Approx(oracles::mrr_by_scan(imp.scores, imp.labels)).epsilon(1e-12));
    for (int k : {1, 5, 10}) {
      CHECK(eval::ndcg_at_k(imp.scores, imp.labels, k) ==
            Approx(oracles::ndcg_by_scan(imp.scores, imp.labels, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("metrics stay in [0, 1] and survive monotone score transforms") {
  Rng rng(2025);
  for (int trial = 0; trial < 50; ++trial) {
    const auto imp = oracles::random_impression(rng, 2, 20, true);
    const double auc = eval::auc(imp.scores, imp.labels);
    const double mrr = eval::mrr(imp.scores, imp.labels);
    const double n5 = eval::ndcg_at_k(imp.scores, imp.labels, 5);
    CHECK(auc >= 0.0);
    CHECK(auc <= 1.0);
    CHECK(mrr >= 0.0);
    CHECK(mrr <= 1.0);
    CHECK(n5 >= 0.0);
    CHECK(n5 <= 1.0);

    // An affine map with positive slope preserves order and exact ties.
    std::vector<double> transformed(imp.scores.size());
    for (std::size_t i = 0; i < imp.scores.size(); ++i) {
      transformed[i] = 3.0 * imp.scores[i] + 2.0;
    }
    CHECK(eval::auc(transformed, imp.labels) == auc);
    CHECK(eval::mrr(transformed, imp.labels) == mrr);
    CHECK(eval::ndcg_at_k(transformed, imp.labels, 5) == n5);
  }
}

TEST_CASE("metric preconditions are enforced") {
  const std::vector<double> scores{0.9, 0.1};
  CHECK_THROWS_WITH_AS(eval::auc(scores, std::vector<int>{1}), doctest::Contains("scores"),
                       Error);
  CHECK_THROWS_WITH_AS(eval::auc(std::vector<double>{}, std::vector<int>{}),
                       doctest::Contains("empty"), Error);
  CHECK_THROWS_WITH_AS(eval::auc(scores, std::vector<int>{1, 2}),
                       doctest::Contains("label"), Error);
  CHECK_THROWS_WITH_AS(eval::auc(scores, std::vector<int>{1, 1}),
                       doctest::Contains("negative"), Error);
  CHECK_THROWS_WITH_AS(eval::mrr(scores, std::vector<int>{0, 0}),
                       doctest::Contains("positive"), Error);
  CHECK_THROWS_WITH_AS(eval::ndcg_at_k(scores, std::vector<int>{0, 0}, 5),
                       doctest::Contains("positive"), Error);
  CHECK_THROWS_WITH_AS(eval::ndcg_at_k(scores, std::vector<int>{1, 0}, 0),
                       doctest::Contains("cutoff"), Error);
}

TEST_CASE("render_metrics emits the fixed key=value line") {
  eval::MetricsReport report;
  report.auc = 0.75;
  report.mrr = 1.0 / 3.0;
  report.ndcg5 = 0.5;
  report.ndcg10 = 0.625;
  report.evaluated = 12;
  report.skipped = 3;
  CHECK(eval::render_metrics(report) ==
        "auc=0.750000 mrr=0.333333 ndcg5=0.500000 ndcg10=0.625000 evaluated=12 skipped=3");
}

TEST_CASE("evaluate_model agrees across layouts and accounts for skips") {
  Rng rng(301);
  const auto config = oracles::tiny_model_config(true);
  const auto params = model::Params<double>::random_init(config, rng);

  // Rows 1..10 carry content; row 11 ("blank") is registered but empty.
  IntMatrix tokens = IntMatrix::Zero(12, 4);
  std::vector<std::string> ids;
  for (Index r = 0; r < 12; ++r) {
    ids.push_back(r == 11 ? "blank" : cat("news", r));
    if (r == 0 || r == 11) continue;
    const Index length = 1 + rng.index_below(4);
    for (Index c = 0; c < length; ++c) {
      tokens(r, c) = 2 + rng.index_below(config.vocab_size - 2);
    }
  }
  const auto features = data::FeatureMatrix::from_rows(tokens, ids, 4, 0, false);

  std::vector<data::ImpressionRecord> impressions;
  impressions.push_back(make_impression(
      "I0", {"news1", "news2", "news3"},
      {{"news4", 1}, {"news5", 0}, {"news6", 0}}));
  impressions.push_back(make_impression(
      "I1", {"news2", "blank", "news7"},  // blank is content-empty: dropped
      {{"news8", 0}, {"news9", 1}, {"news10", 0}, {"news4", 0}}));
  impressions.push_back(make_impression("I2", {}, {{"news3", 1}, {"news5", 0}}));
  impressions.push_back(make_impression(  // no negative: skipped
      "I3", {"news1"}, {{"news2", 1}, {"news3", 1}}));
  impressions.push_back(make_impression(  // no positive: skipped
      "I4", {"news1"}, {{"news2", 0}, {"news3", 0}}));

  eval::EvalOptions concat;
  concat.layout = batching::Layout::kConcat;
  concat.history_max = 4;
  eval::EvalOptions zero_pad = concat;
  zero_pad.layout = batching::Layout::kZeroPad;

  eval::EvalStats concat_stats;
  eval::EvalStats pad_stats;
  const auto a = eval::evaluate_model(params, impressions, features, concat, &concat_stats);
  const auto b = eval::evaluate_model(params, impressions, features, zero_pad, &pad_stats);

  CHECK(a.evaluated == 3);
  CHECK(a.skipped == 2);
  CHECK(b.evaluated == 3);
  CHECK(b.skipped == 2);
  CHECK(a.auc == Approx(b.auc).epsilon(1e-10));
  CHECK(a.mrr == Approx(b.mrr).epsilon(1e-10));
  CHECK(a.ndcg5 == Approx(b.ndcg5).epsilon(1e-10));
  CHECK(a.ndcg10 == Approx(b.ndcg10).epsilon(1e-10));

  // Concat encodes each referenced news row once; zero-pad re-encodes one
  // row per padded history slot plus one per candidate occurrence.
  CHECK(concat_stats.encoded_rows == 10);  // news1..news10, blank dropped
  CHECK(pad_stats.encoded_rows == 3 * 4 + 9);
  CHECK(concat_stats.evaluated == 3);
  CHECK(pad_stats.skipped == 2);
}

TEST_CASE("evaluate_model is block-size independent") {
  Rng rng(303);
  const auto config = oracles::tiny_model_config(false);
  const auto params = model::Params<double>::random_init(config, rng);
  const auto features = oracles::tiny_features(10, 4, rng, config.vocab_size);
  std::vector<data::ImpressionRecord> impressions;
  for (int i = 0; i < 9; ++i) {
    impressions.push_back(make_impression(
        cat("I", i), {cat("news", 1 + i % 9), cat("news", 1 + (i + 3) % 9)},
        {{cat("news", 1 + (i + 1) % 9), 1}, {cat("news", 1 + (i + 4) % 9), 0}}));
  }
  eval::EvalOptions small;
  small.history_max = 3;
  small.block = 2;
  eval::EvalOptions large = small;
  large.block = 256;
  const auto a = eval::evaluate_model(params, impressions, features, small);
  const auto c = eval::evaluate_model(params, impressions, features, large);
  CHECK(a.evaluated == c.evaluated);
  CHECK(a.auc == Approx(c.auc).epsilon(1e-12));
  CHECK(a.mrr == Approx(c.mrr).epsilon(1e-12));
  CHECK(a.ndcg10 == Approx(c.ndcg10).epsilon(1e-12));
}

TEST_CASE("evaluate_model truncates history to the most recent entries") {
  Rng rng(305);
  const auto config = oracles::tiny_model_config(false);
  const auto params = model::Params<double>::random_init(config, rng);
  const auto features = oracles::tiny_features(10, 4, rng, config.vocab_size);

  const std::vector<data::CandidateLabel> candidates{{"news8", 1}, {"news9", 0}};
  std::vector<data::ImpressionRecord> full{
      make_impression("I0", {"news1", "news2", "news3", "news4"}, candidates)};
  std::vector<data::ImpressionRecord> tail{
      make_impression("I0", {"news3", "news4"}, candidates)};

  eval::EvalOptions options;
  options.history_max = 2;
  const auto truncated = eval::evaluate_model(params, full, features, options);
  options.history_max = 4;
  const auto manual = eval::evaluate_model(params, tail, features, options);
  CHECK(truncated.auc == Approx(manual.auc).epsilon(1e-12));
  CHECK(truncated.mrr == Approx(manual.mrr).epsilon(1e-12));
}

TEST_CASE("evaluate_model handles the degenerate ends") {
  Rng rng(307);
  const auto config = oracles::tiny_model_config(true);
  const auto params = model::Params<double>::random_init(config, rng);
  const auto features = oracles::tiny_features(8, 4, rng, config.vocab_size);

  SUBCASE("every impression skipped yields a zero report") {
    std::vector<data::ImpressionRecord> impressions{
        make_impression("I0", {"news1"}, {{"news2", 1}}),
        make_impression("I1", {"news1"}, {{"news3", 0}})};
    const auto report = eval::evaluate_model(params, impressions, features, {});
    CHECK(report.evaluated == 0);
    CHECK(report.skipped == 2);
    CHECK(report.auc == 0.0);
    CHECK(report.mrr == 0.0);
  }

  SUBCASE("unknown candidate id is an error, not a skip") {
    std::vector<data::ImpressionRecord> impressions{
        make_impression("I0", {"news1"}, {{"news2", 1}, {"missing", 0}})};
    CHECK_THROWS_WITH_AS(eval::evaluate_model(params, impressions, features, {}),
                         doctest::Contains("unknown news id"), Error);
  }

  SUBCASE("option validation") {
    eval::EvalOptions options;
    options.history_max = 0;
    CHECK_THROWS_WITH_AS(eval::evaluate_model(params, {}, features, options),
                         doctest::Contains("history_max"), Error);
    options.history_max = 4;
    options.block = 0;
    CHECK_THROWS_WITH_AS(eval::evaluate_model(params, {}, features, options),
                         doctest::Contains("block"), Error);
  }
}

}  // TEST_SUITE
