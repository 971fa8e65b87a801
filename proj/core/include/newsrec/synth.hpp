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

#ifndef NEWSREC_SYNTH_HPP_
#define NEWSREC_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "newsrec/batching.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/types.hpp"

// Seeded synthetic datasets: a planted-preference corpus where learning is
// possible by construction (every user clicks exactly one category, and
// categories use disjoint word pools), a skewed-history dataset for
// throughput measurement, and a small mixed-quality fixture that exercises
// the full pipeline including its skip paths.

namespace newsrec::synth {

struct PlantedConfig {
  Index categories = 8;
  Index news_per_category = 40;
  Index words_per_category = 30;
  Index filler_words = 20;   // shared across categories
  Index title_words = 8;     // per title: title_words - filler_per_title from the pool
  Index filler_per_title = 2;
  Index history_min = 6;
  Index history_max = 12;
  Index negatives = 4;       // per impression, drawn from other categories
  Index train_impressions = 2000;
  Index dev_impressions = 500;
  std::uint64_t seed = 7;
};

struct PlantedCorpus {
  std::vector<data::NewsRecord> news;
  std::vector<data::ImpressionRecord> train;
  std::vector<data::ImpressionRecord> dev;
};

PlantedCorpus make_planted_corpus(const PlantedConfig& config);

struct ThroughputConfig {
  Index news = 20000;
  Index vocab_words = 5000;  // token ids drawn from [2, 2 + vocab_words)
  Index title_len = 30;      // L; every row fully populated
  Index instances = 5000;
  Index history_min = 1;     // history length uniform on [min, max]
  Index history_max = 50;
  Index negatives = 4;
  std::uint64_t seed = 11;
};

struct ThroughputData {
  data::FeatureMatrix features;
  std::vector<batching::TrainingInstance> instances;
};

ThroughputData make_throughput_data(const ThroughputConfig& config);

struct FixtureConfig {
  Index news = 200;
  Index impressions = 500;
  Index categories = 8;
  Index title_words = 10;
  Index body_words = 20;
  Index embedding_dim = 64;
  std::uint64_t seed = 13;
};

// Raw-input fixture on disk: news.tsv, behaviors.tsv and embeddings.txt in
// the pretrained-table text format. A handful of impressions have empty
// histories, no positives, or no negatives, so downstream skip paths run.
// The embeddings file covers most but not all corpus words.
void write_fixture(const std::string& dir, const FixtureConfig& config);

}  // namespace newsrec::synth

#endif  // NEWSREC_SYNTH_HPP_
