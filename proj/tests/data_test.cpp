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

#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "newsrec/artifacts.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/io.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/types.hpp"

using namespace newsrec;
using data::FeatureMatrix;
using data::Vocabulary;

namespace {

std::string temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "newsrec_data_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = cat(temp_dir(), "/", name);
  io::write_text_file(path, content);
  return path;
}

std::vector<data::NewsRecord> sample_news() {
  std::vector<data::NewsRecord> news(3);
  news[0] = {"N1", "sports", "soccer", {"goal", "match", "goal"}, {"extra", "goal"}};
  news[1] = {"N2", "tech", "ai", {"chips", "match"}, {}};
  news[2] = {"N3", "tech", "web", {"browser"}, {"chips"}};
  return news;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  CHECK(data::tokenize("5G-Home internet!") ==
        std::vector<std::string>{"5g", "home", "internet"});
  CHECK(data::tokenize("  A  b\tC ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(data::tokenize("...") == std::vector<std::string>{});
  CHECK(data::tokenize("").empty());
}

TEST_CASE("news parser handles extra columns and rejects bad lines") {
  const std::string path = write_file(
      "news.tsv",
      "N1\tsports\tsoccer\tBig Match Tonight!\tThe big game.\textra-col\n"
      "N2\ttech\tai\tNew chips\t\n");
  const auto news = data::parse_news_file(path);
  REQUIRE(news.size() == 2);
  CHECK(news[0].news_id == "N1");
  CHECK(news[0].title_tokens == std::vector<std::string>{"big", "match", "tonight"});
  CHECK(news[0].body_tokens == std::vector<std::string>{"the", "big", "game"});
  CHECK(news[1].body_tokens.empty());

  const std::string dup = write_file("dup.tsv", "N1\ta\tb\tt\tb\nN1\ta\tb\tt\tb\n");
  CHECK_THROWS_WITH_AS(data::parse_news_file(dup), doctest::Contains("N1"), Error);
  const std::string narrow = write_file("narrow.tsv", "N1\ta\tb\n");
  CHECK_THROWS_WITH_AS(data::parse_news_file(narrow), doctest::Contains("narrow.tsv:1"), Error);
}

TEST_CASE("behaviors parser splits history and labeled candidates") {
  const std::string path = write_file(
      "behaviors.tsv",
      "1\tU1\t11/11/2019 9:00:00 AM\tN1 N2\tN3-1 N1-0\n"
      "2\tU2\t11/11/2019 9:05:00 AM\t\tN2-0 N3-1\n");
  const auto impressions = data::parse_behaviors_file(path);
  REQUIRE(impressions.size() == 2);
  CHECK(impressions[0].user_id == "U1");
  CHECK(impressions[0].history == std::vector<std::string>{"N1", "N2"});
  REQUIRE(impressions[0].candidates.size() == 2);
  CHECK(impressions[0].candidates[0].news_id == "N3");
  CHECK(impressions[0].candidates[0].label == 1);
  CHECK(impressions[1].history.empty());

  const std::string bad = write_file("bad.tsv", "1\tU1\tts\tN1\tN3-2\n");
  CHECK_THROWS_AS(data::parse_behaviors_file(bad), Error);
  const std::string nodash = write_file("nodash.tsv", "1\tU1\tts\tN1\tN3\n");
  CHECK_THROWS_AS(data::parse_behaviors_file(nodash), Error);
}

TEST_CASE("tsv writers round-trip through the parsers") {
  const auto news = sample_news();
  const std::string news_path = cat(temp_dir(), "/roundtrip_news.tsv");
  data::write_news_file(news_path, news);
  const auto news2 = data::parse_news_file(news_path);
  REQUIRE(news2.size() == news.size());
  for (std::size_t i = 0; i < news.size(); ++i) {
    CHECK(news2[i].news_id == news[i].news_id);
    CHECK(news2[i].category == news[i].category);
    CHECK(news2[i].title_tokens == news[i].title_tokens);
    CHECK(news2[i].body_tokens == news[i].body_tokens);
  }

  std::vector<data::ImpressionRecord> impressions(2);
  impressions[0] = {"1", "U1", "11/11/2019 9:00:00 AM", {"N1"}, {{"N2", 1}, {"N3", 0}}};
  impressions[1] = {"2", "U2", "11/11/2019 9:05:00 AM", {}, {{"N1", 0}, {"N2", 1}}};
  const std::string behaviors_path = cat(temp_dir(), "/roundtrip_behaviors.tsv");
  data::write_behaviors_file(behaviors_path, impressions);
  const auto impressions2 = data::parse_behaviors_file(behaviors_path);
  REQUIRE(impressions2.size() == 2);
  CHECK(impressions2[0].history == impressions[0].history);
  CHECK(impressions2[0].candidates.size() == 2);
  CHECK(impressions2[1].history.empty());
  CHECK(impressions2[1].candidates[1].news_id == "N2");
}

TEST_CASE("vocabulary ranks by frequency then lexicographically") {
  const auto vocab = data::build_vocabulary(sample_news(), 1, 100);
  // goal x3, chips x2, match x2, then singles alphabetically.
  CHECK(vocab.index_of("goal") == 2);
  CHECK(vocab.index_of("chips") == 3);
  CHECK(vocab.index_of("match") == 4);
  CHECK(vocab.index_of("browser") == 5);
  CHECK(vocab.index_of("extra") == 6);
  CHECK(vocab.word(0) == "<pad>");
  CHECK(vocab.word(1) == "<unk>");
  CHECK(vocab.index_of("absent") == Vocabulary::kUnk);

  const auto capped = data::build_vocabulary(sample_news(), 1, 4);
  CHECK(capped.size() == 4);
  CHECK(capped.index_of("match") == Vocabulary::kUnk);

  const auto min2 = data::build_vocabulary(sample_news(), 2, 100);
  CHECK(min2.index_of("browser") == Vocabulary::kUnk);
  CHECK(min2.size() == 5);
}

TEST_CASE("pretrained loader fills hits from file and misses from the seed") {
  const auto vocab = data::build_vocabulary(sample_news(), 1, 100);
  const std::string path = write_file("vectors.txt",
                                      "goal 1 2 3\n"
                                      "browser -1 -2 -3\n"
                                      "unrelated 9 9 9\n");
  const auto table = data::load_pretrained_embeddings(path, vocab, 3, Rng(5));
  REQUIRE(table.rows() == vocab.size());
  CHECK(table(2, 0) == 1.0f);
  CHECK(table(2, 2) == 3.0f);
  CHECK(table(5, 0) == -1.0f);
  CHECK(table.row(0).isZero());
  // Missing word row is random but seeded.
  const auto again = data::load_pretrained_embeddings(path, vocab, 3, Rng(5));
  CHECK((table.array() == again.array()).all());
  const auto other_seed = data::load_pretrained_embeddings(path, vocab, 3, Rng(6));
  CHECK((table.row(3).array() != other_seed.row(3).array()).any());
  CHECK(std::abs(table(3, 0)) <= 0.1f);

  const std::string bad = write_file("badvec.txt", "goal 1 2\n");
  CHECK_THROWS_WITH_AS(data::load_pretrained_embeddings(bad, vocab, 3, Rng(5)),
                       doctest::Contains("badvec.txt:1"), Error);
}

TEST_CASE("feature matrix truncates, pads and reserves the null row") {
  const auto vocab = data::build_vocabulary(sample_news(), 1, 100);
  const auto features = data::build_feature_matrix(sample_news(), vocab, 2, 2, true);
  REQUIRE(features.rows() == 4);  // null + 3 news
  CHECK(features.width() == 4);
  CHECK(features.row_is_empty(0));
  CHECK_FALSE(features.has("absent"));
  const Index r1 = features.row_of("N1");
  // Title truncated to 2 tokens, body appended after the title block.
  CHECK(features.tokens()(r1, 0) == vocab.index_of("goal"));
  CHECK(features.tokens()(r1, 1) == vocab.index_of("match"));
  CHECK(features.tokens()(r1, 2) == vocab.index_of("extra"));
  CHECK(features.tokens()(r1, 3) == vocab.index_of("goal"));
  const Index r3 = features.row_of("N3");
  CHECK(features.tokens()(r3, 1) == 0);  // short title padded

  const auto title_only = data::build_feature_matrix(sample_news(), vocab, 2, 2, false);
  CHECK(title_only.width() == 2);
  CHECK_THROWS_AS(title_only.row_of("missing"), Error);

  const auto gathered = title_only.gather({r3, r1});
  CHECK(gathered.rows() == 2);
  CHECK(gathered(0, 0) == vocab.index_of("browser"));
}

TEST_CASE("artifact files round-trip bit-exactly") {
  const std::string dir = cat(temp_dir(), "/artifacts");
  std::filesystem::create_directories(dir);
  const auto vocab = data::build_vocabulary(sample_news(), 1, 100);
  artifacts::write_vocabulary(cat(dir, "/", artifacts::kVocabFile), vocab);
  const auto vocab2 = artifacts::read_vocabulary(cat(dir, "/", artifacts::kVocabFile));
  REQUIRE(vocab2.size() == vocab.size());
  for (Index i = 0; i < vocab.size(); ++i) CHECK(vocab2.word(i) == vocab.word(i));

  const auto table = data::load_pretrained_embeddings(
      write_file("emb.txt", "goal 1 2 3\n"), vocab, 3, Rng(5));
  artifacts::write_embeddings(cat(dir, "/", artifacts::kEmbeddingsFile), table);
  const auto table2 = artifacts::read_embeddings(cat(dir, "/", artifacts::kEmbeddingsFile));
  CHECK((table2.array() == table.array()).all());

  const auto features = data::build_feature_matrix(sample_news(), vocab, 3, 2, true);
  artifacts::write_features(cat(dir, "/", artifacts::kFeaturesFile),
                            cat(dir, "/", artifacts::kFeatureIdsFile), features);
  const auto features2 = artifacts::read_features(cat(dir, "/", artifacts::kFeaturesFile),
                                                  cat(dir, "/", artifacts::kFeatureIdsFile));
  CHECK((features2.tokens().array() == features.tokens().array()).all());
  CHECK(features2.row_of("N2") == features.row_of("N2"));
  CHECK(features2.l_title() == 3);

  std::vector<batching::TrainingInstance> instances(2);
  instances[0] = {{1, 2}, {3, 1, 2, 3, 1}, 2};
  instances[1] = {{3}, {1, 2, 3, 1, 2}, 0};
  artifacts::write_instances(cat(dir, "/", artifacts::kInstancesFile), instances);
  const auto instances2 = artifacts::read_instances(cat(dir, "/", artifacts::kInstancesFile));
  REQUIRE(instances2.size() == 2);
  CHECK(instances2[0].history == instances[0].history);
  CHECK(instances2[0].candidates == instances[0].candidates);
  CHECK(instances2[0].positive_position == 2);
  CHECK(instances2[1].history == instances[1].history);

  artifacts::write_meta(cat(dir, "/", artifacts::kMetaFile), {{"a", "1"}, {"b", "x y"}});
  const auto meta = artifacts::read_meta(cat(dir, "/", artifacts::kMetaFile));
  CHECK(meta.at("a") == "1");
  CHECK(meta.at("b") == "x y");
}

}  // TEST_SUITE
