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

#ifndef NEWSREC_ARTIFACTS_HPP_
#define NEWSREC_ARTIFACTS_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "newsrec/batching.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/types.hpp"

// Processed-data directory: the flat files preprocess writes and the
// training-side commands read back. Everything is deterministic for fixed
// inputs and seed, so rerunning preprocess reproduces every file byte for
// byte (meta.txt intentionally carries no timestamps).
//
//   vocab.txt            one word per line, vocabulary order
//   embeddings.bin       f32 [vocab, dim] row-major with a text-free header
//   features.bin         i32 token rows plus title/body layout
//   feature_ids.txt      news id per feature row
//   train_instances.tsv  history rows <TAB> candidate rows <TAB> positive
//   dev_impressions.tsv  behaviors-format dev split
//   meta.txt             key=value run description

namespace newsrec::artifacts {

inline constexpr const char* kVocabFile = "vocab.txt";
inline constexpr const char* kEmbeddingsFile = "embeddings.bin";
inline constexpr const char* kFeaturesFile = "features.bin";
inline constexpr const char* kFeatureIdsFile = "feature_ids.txt";
inline constexpr const char* kInstancesFile = "train_instances.tsv";
inline constexpr const char* kDevFile = "dev_impressions.tsv";
inline constexpr const char* kMetaFile = "meta.txt";

void write_vocabulary(const std::string& path, const data::Vocabulary& vocab);
data::Vocabulary read_vocabulary(const std::string& path);

void write_embeddings(const std::string& path, const data::EmbeddingMatrix& table);
data::EmbeddingMatrix read_embeddings(const std::string& path);

void write_features(const std::string& bin_path, const std::string& ids_path,
                    const data::FeatureMatrix& features);
data::FeatureMatrix read_features(const std::string& bin_path, const std::string& ids_path);

void write_instances(const std::string& path,
                     const std::vector<batching::TrainingInstance>& instances);
std::vector<batching::TrainingInstance> read_instances(const std::string& path);

// Ordered key=value lines.
void write_meta(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> read_meta(const std::string& path);

struct DataDir {
  data::Vocabulary vocab;
  data::EmbeddingMatrix embeddings;
  data::FeatureMatrix features;
  std::vector<batching::TrainingInstance> instances;
  std::vector<data::ImpressionRecord> dev;
  std::map<std::string, std::string> meta;
};

// Loads a whole processed directory; missing or inconsistent files raise
// Error naming the path.
DataDir load_data_dir(const std::string& dir);

}  // namespace newsrec::artifacts

#endif  // NEWSREC_ARTIFACTS_HPP_
