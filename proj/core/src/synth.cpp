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

#include "newsrec/synth.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "newsrec/io.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/strings.hpp"

namespace newsrec::synth {

namespace {

std::vector<std::string> category_pool(Index category, Index words) {
  std::vector<std::string> pool;
  for (Index w = 0; w < words; ++w) pool.push_back(cat("c", category, "w", w));
  return pool;
}

const std::string& pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[static_cast<std::size_t>(rng.below(pool.size()))];
}

data::ImpressionRecord make_impression(const std::string& impression_id,
                                       const std::string& user_id, Index preferred,
                                       const std::vector<std::vector<std::string>>& news_by_cat,
                                       const PlantedConfig& config, Rng& rng) {
  data::ImpressionRecord imp;
  imp.impression_id = impression_id;
  imp.user_id = user_id;
  imp.timestamp = "11/11/2019 10:00:00 AM";
  const auto& own = news_by_cat[static_cast<std::size_t>(preferred)];

  const Index span = config.history_max - config.history_min + 1;
  const Index hist_len = config.history_min + static_cast<Index>(rng.below(
                             static_cast<std::uint64_t>(span)));
  for (Index h = 0; h < hist_len; ++h) {
    imp.history.push_back(pick(own, rng));
  }

  imp.candidates.push_back({pick(own, rng), 1});
  for (Index n = 0; n < config.negatives; ++n) {
    Index other = static_cast<Index>(rng.below(static_cast<std::uint64_t>(config.categories - 1)));
    if (other >= preferred) ++other;
    const auto& pool = news_by_cat[static_cast<std::size_t>(other)];
    imp.candidates.push_back({pick(pool, rng), 0});
  }
  return imp;
}

}  // namespace

PlantedCorpus make_planted_corpus(const PlantedConfig& config) {
  if (config.categories < 2) throw Error("planted corpus needs at least 2 categories");
  if (config.filler_per_title >= config.title_words) {
    throw Error("filler_per_title must leave room for pool words");
  }
  PlantedCorpus corpus;
  Rng news_rng = Rng(config.seed).fork("planted news");
  Rng train_rng = Rng(config.seed).fork("planted train");
  Rng dev_rng = Rng(config.seed).fork("planted dev");

  std::vector<std::string> filler;
  for (Index w = 0; w < config.filler_words; ++w) filler.push_back(cat("fill", w));

  std::vector<std::vector<std::string>> news_by_cat(static_cast<std::size_t>(config.categories));
  for (Index c = 0; c < config.categories; ++c) {
    const std::vector<std::string> pool = category_pool(c, config.words_per_category);
    for (Index j = 0; j < config.news_per_category; ++j) {
      data::NewsRecord record;
      record.news_id = cat("N", c, "x", j);
      record.category = cat("cat", c);
      record.subcategory = cat("cat", c, "sub", j % 4);
      for (Index w = 0; w < config.title_words - config.filler_per_title; ++w) {
        record.title_tokens.push_back(pick(pool, news_rng));
      }
      for (Index w = 0; w < config.filler_per_title; ++w) {
        record.title_tokens.push_back(pick(filler, news_rng));
      }
      news_by_cat[static_cast<std::size_t>(c)].push_back(record.news_id);
      corpus.news.push_back(std::move(record));
    }
  }

  for (Index i = 0; i < config.train_impressions; ++i) {
    corpus.train.push_back(make_impression(cat("T", i), cat("U", i), i % config.categories,
                                           news_by_cat, config, train_rng));
  }
  for (Index i = 0; i < config.dev_impressions; ++i) {
    corpus.dev.push_back(make_impression(cat("D", i), cat("V", i), i % config.categories,
                                         news_by_cat, config, dev_rng));
  }
  return corpus;
}

ThroughputData make_throughput_data(const ThroughputConfig& config) {
  if (config.news < 1 || config.instances < 1) throw Error("throughput dataset is empty");
  if (config.history_min < 1 || config.history_min > config.history_max) {
    throw Error("throughput history bounds must satisfy 1 <= min <= max");
  }
  Rng rng(config.seed);

  IntMatrix tokens = IntMatrix::Zero(config.news + 1, config.title_len);
  std::vector<std::string> ids(static_cast<std::size_t>(config.news) + 1);
  ids[0] = "<null>";
  for (Index n = 1; n <= config.news; ++n) {
    ids[static_cast<std::size_t>(n)] = cat("N", n);
    for (Index t = 0; t < config.title_len; ++t) {
      tokens(n, t) = 2 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(config.vocab_words)));
    }
  }

  ThroughputData out;
  out.features = data::FeatureMatrix::from_rows(std::move(tokens), std::move(ids),
                                                config.title_len, 0, false);
  const Index span = config.history_max - config.history_min + 1;
  for (Index i = 0; i < config.instances; ++i) {
    batching::TrainingInstance instance;
    const Index hist = config.history_min +
                       static_cast<Index>(rng.below(static_cast<std::uint64_t>(span)));
    for (Index h = 0; h < hist; ++h) {
      instance.history.push_back(1 + static_cast<Index>(
                                         rng.below(static_cast<std::uint64_t>(config.news))));
    }
    for (Index c = 0; c < config.negatives + 1; ++c) {
      instance.candidates.push_back(1 + static_cast<Index>(
                                            rng.below(static_cast<std::uint64_t>(config.news))));
    }
    instance.positive_position =
        static_cast<Index>(rng.below(static_cast<std::uint64_t>(config.negatives + 1)));
    out.instances.push_back(std::move(instance));
  }
  return out;
}

void write_fixture(const std::string& dir, const FixtureConfig& config) {
  std::filesystem::create_directories(dir);
  Rng rng(config.seed);

  PlantedConfig planted;
  planted.categories = config.categories;
  planted.news_per_category = (config.news + config.categories - 1) / config.categories;
  planted.title_words = config.title_words;
  planted.history_min = 2;
  planted.history_max = 20;
  planted.train_impressions = config.impressions;
  planted.dev_impressions = 0;
  planted.seed = mix_seed(config.seed, hash64("fixture corpus"));
  PlantedCorpus corpus = make_planted_corpus(planted);

  // Bodies reuse the category pools so body tokens stay in-vocabulary.
  for (data::NewsRecord& record : corpus.news) {
    std::vector<std::string> pool = category_pool(
        static_cast<Index>(&record - corpus.news.data()) / planted.news_per_category,
        planted.words_per_category);
    for (Index w = 0; w < config.body_words; ++w) {
      record.body_tokens.push_back(pick(pool, rng));
    }
  }

  // Mixed-quality lines: empty history, no positive, no negative.
  auto& impressions = corpus.train;
  if (impressions.size() >= 10) {
    impressions[3].history.clear();
    for (auto& candidate : impressions[5].candidates) candidate.label = 0;
    for (auto& candidate : impressions[7].candidates) candidate.label = 1;
  }

  data::write_news_file(dir + "/news.tsv", corpus.news);
  data::write_behaviors_file(dir + "/behaviors.tsv", impressions);

  // Pretrained-format embedding file over ~90% of the corpus words.
  std::set<std::string> words;
  for (const data::NewsRecord& record : corpus.news) {
    words.insert(record.title_tokens.begin(), record.title_tokens.end());
    words.insert(record.body_tokens.begin(), record.body_tokens.end());
  }
  std::ofstream out = io::open_output(dir + "/embeddings.txt");
  for (const std::string& word : words) {
    if (rng.uniform() < 0.1) continue;
    out << word;
    for (Index d = 0; d < config.embedding_dim; ++d) {
      out << " " << format_real(rng.uniform(-0.1, 0.1));
    }
    out << "\n";
  }
  if (!out) throw Error(cat("failed writing ", dir, "/embeddings.txt"));
}

}  // namespace newsrec::synth
