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

#ifndef NEWSREC_DATA_INGEST_HPP_
#define NEWSREC_DATA_INGEST_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "newsrec/rng.hpp"
#include "newsrec/types.hpp"

namespace newsrec::data {

struct NewsRecord {
  std::string news_id;
  std::string category;
  std::string subcategory;
  std::vector<std::string> title_tokens;
  std::vector<std::string> body_tokens;
};

struct CandidateLabel {
  std::string news_id;
  int label = 0;  // 1 = clicked, 0 = shown but not clicked
};

struct ImpressionRecord {
  std::string impression_id;
  std::string user_id;
  std::string timestamp;
  std::vector<std::string> history;  // clicked news ids, oldest first
  std::vector<CandidateLabel> candidates;
};

// Word index table. Index 0 is reserved for padding, index 1 for
// out-of-vocabulary words; real words start at index 2.
class Vocabulary {
 public:
  static constexpr Index kPad = 0;
  static constexpr Index kUnk = 1;

  Vocabulary();

  // Appends a word and returns its index. Throws Error on duplicates or on
  // the reserved sentinel spellings.
  Index add(const std::string& word);

  // Index of `word`, or kUnk when the word is unknown.
  Index index_of(const std::string& word) const;
  bool contains(const std::string& word) const { return index_.count(word) > 0; }

  const std::string& word(Index index) const;
  Index size() const { return static_cast<Index>(words_.size()); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, Index> index_;
};

// Pretrained (or randomly initialized) word vectors, one row per vocabulary
// index. Row kPad is all zeros. Stored in f32 like the on-disk artifacts.
using EmbeddingMatrix = Matrix<float>;

// Fixed-width token rows, one per news article. Row 0 is the "null" news:
// all padding. Each row holds the title truncated or padded to l_title
// tokens, followed by the body truncated or padded to l_body tokens when
// bodies are enabled.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  static FeatureMatrix from_rows(IntMatrix tokens, std::vector<std::string> ids, Index l_title,
                                 Index l_body, bool use_body);

  Index rows() const { return static_cast<Index>(tokens_.rows()); }
  Index width() const { return static_cast<Index>(tokens_.cols()); }
  Index l_title() const { return l_title_; }
  Index l_body() const { return l_body_; }
  bool use_body() const { return use_body_; }

  bool has(const std::string& news_id) const { return index_.count(news_id) > 0; }
  // Throws Error naming the id when unknown.
  Index row_of(const std::string& news_id) const;
  const std::string& news_id(Index row) const;

  const IntMatrix& tokens() const { return tokens_; }
  // True when every token in the row is padding (row 0 always is).
  bool row_is_empty(Index row) const;

  // Copies the given rows into a dense block, in order.
  IntMatrix gather(const std::vector<Index>& rows) const;

 private:
  IntMatrix tokens_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> index_;
  Index l_title_ = 0;
  Index l_body_ = 0;
  bool use_body_ = false;
};

// Lowercases and splits on runs of non-alphanumeric characters (ASCII).
// "5G-Home internet!" -> ["5g", "home", "internet"]. Never returns empty
// tokens; empty input gives an empty list.
std::vector<std::string> tokenize(const std::string& text);

// Parses a tab-separated news file: id, category, subcategory, title, body.
// Extra columns are ignored. Duplicate ids and lines with fewer than five
// fields raise Error naming the id or 1-based line number.
std::vector<NewsRecord> parse_news_file(const std::string& path);

// Parses a tab-separated behaviors file: impression id, user id, timestamp,
// space-separated history ids, space-separated "newsid-label" candidates.
// Labels outside {0,1} or candidates without a '-' raise Error.
std::vector<ImpressionRecord> parse_behaviors_file(const std::string& path);

// Builds the vocabulary over title+body tokens of `news`: words occurring at
// least `min_count` times, ranked by frequency (descending) with ties broken
// by lexicographic order, truncated to `max_size` entries including the two
// sentinels. Requires min_count >= 1 and max_size > 2.
Vocabulary build_vocabulary(const std::vector<NewsRecord>& news, int min_count, Index max_size);

// Loads whitespace-separated "word v1 .. vD" vectors. Every line must carry
// exactly `dim` values (Error naming the 1-based line otherwise). Rows for
// words missing from the file are drawn uniformly from [-0.1, 0.1] using
// `rng`; row kPad is zeroed last. Reproducible for a fixed seed.
EmbeddingMatrix load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                                           Index dim, Rng rng);

// Maps every news record to a token-index row (row 0 reserved for the null
// news). Unknown words map to Vocabulary::kUnk. Requires l_title >= 1 and,
// when use_body is set, l_body >= 1.
FeatureMatrix build_feature_matrix(const std::vector<NewsRecord>& news, const Vocabulary& vocab,
                                   Index l_title, Index l_body, bool use_body);

// TSV writers mirroring the two parsers above; parse(write(x)) == x for
// records whose tokens came from tokenize().
void write_news_file(const std::string& path, const std::vector<NewsRecord>& news);
void write_behaviors_file(const std::string& path,
                          const std::vector<ImpressionRecord>& impressions);

}  // namespace newsrec::data

#endif  // NEWSREC_DATA_INGEST_HPP_
