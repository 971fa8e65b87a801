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

// Writes seeded synthetic raw inputs for experiments and pipeline tests:
//
//   fixture  mixed-quality news/behaviors/embeddings, pipeline-shaped
//   planted  planted-preference corpus (train and dev behaviors files)

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "newsrec/config.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/synth.hpp"
#include "newsrec/types.hpp"

namespace {

using namespace newsrec;

config::Schema makedata_schema() {
  config::Schema schema;
  schema.add_required_string("kind", "dataset kind: fixture | planted")
      .add_required_string("out", "output directory")
      .add_int("news", 200, "news count (fixture)")
      .add_int("impressions", 500, "impression count (fixture)")
      .add_int("categories", 8, "category count")
      .add_int("news_per_category", 40, "news per category (planted)")
      .add_int("train_impressions", 2000, "train impressions (planted)")
      .add_int("dev_impressions", 500, "dev impressions (planted)")
      .add_int("negatives", 4, "negatives per impression (planted)")
      .add_int("seed", 13, "dataset seed");
  return schema;
}

int run(std::span<const std::string> args) {
  const config::Schema schema = makedata_schema();
  for (const std::string& arg : args) {
    if (arg == "--help" || arg == "-h") {
      std::cout << "usage: newsrec-makedata --kind fixture|planted --out DIR [--key value]...\n\n"
                << schema.describe();
      return 0;
    }
  }
  config::Config cfg = config::parse_config(schema, args);
  cfg.check_required();

  const std::string kind = cfg.get_string("kind");
  const std::string out = cfg.get_string("out");
  std::filesystem::create_directories(out);

  if (kind == "fixture") {
    synth::FixtureConfig fixture;
    fixture.news = static_cast<Index>(cfg.get_int("news"));
    fixture.impressions = static_cast<Index>(cfg.get_int("impressions"));
    fixture.categories = static_cast<Index>(cfg.get_int("categories"));
    fixture.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
    synth::write_fixture(out, fixture);
    std::cout << "wrote fixture: " << out << "/news.tsv, behaviors.tsv, embeddings.txt\n";
    return 0;
  }
  if (kind == "planted") {
    synth::PlantedConfig planted;
    planted.categories = static_cast<Index>(cfg.get_int("categories"));
    planted.news_per_category = static_cast<Index>(cfg.get_int("news_per_category"));
    planted.train_impressions = static_cast<Index>(cfg.get_int("train_impressions"));
    planted.dev_impressions = static_cast<Index>(cfg.get_int("dev_impressions"));
    planted.negatives = static_cast<Index>(cfg.get_int("negatives"));
    planted.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
    const synth::PlantedCorpus corpus = synth::make_planted_corpus(planted);
    data::write_news_file(cat(out, "/news.tsv"), corpus.news);
    data::write_behaviors_file(cat(out, "/behaviors.tsv"), corpus.train);
    data::write_behaviors_file(cat(out, "/dev_behaviors.tsv"), corpus.dev);
    std::cout << "wrote planted corpus: " << out
              << "/news.tsv, behaviors.tsv, dev_behaviors.tsv\n";
    return 0;
  }
  std::cerr << "unknown kind '" << kind << "' (expected fixture or planted)\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
