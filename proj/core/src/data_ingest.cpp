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

#include "newsrec/data_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "newsrec/io.hpp"
#include "newsrec/strings.hpp"

namespace newsrec::data {

namespace {

constexpr char kPadWord[] = "<pad>";
constexpr char kUnkWord[] = "<unk>";

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

Vocabulary::Vocabulary() {
  words_ = {kPadWord, kUnkWord};
  index_.emplace(kPadWord, kPad);
  index_.emplace(kUnkWord, kUnk);
}

Index Vocabulary::add(const std::string& word) {
  if (word.empty()) throw Error("vocabulary words must be non-empty");
  auto [it, inserted] = index_.emplace(word, static_cast<Index>(words_.size()));
  if (!inserted) throw Error(cat("duplicate vocabulary word: ", word));
  words_.push_back(word);
  return it->second;
}

Index Vocabulary::index_of(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::word(Index index) const {
  if (index < 0 || index >= size()) {
    throw Error(cat("vocabulary index out of range: ", index, " (size ", size(), ")"));
  }
  return words_[static_cast<std::size_t>(index)];
}

FeatureMatrix FeatureMatrix::from_rows(IntMatrix tokens, std::vector<std::string> ids,
                                       Index l_title, Index l_body, bool use_body) {
  const Index expected_width = l_title + (use_body ? l_body : 0);
  if (tokens.cols() != expected_width) {
    throw Error(cat("feature rows are ", tokens.cols(), " tokens wide, expected ",
                    expected_width));
  }
  if (tokens.rows() < 1 || static_cast<Index>(ids.size()) != tokens.rows()) {
    throw Error("feature matrix needs one id per row, with row 0 reserved");
  }
  if ((tokens.row(0).array() != 0).any()) {
    throw Error("feature matrix row 0 must be all padding");
  }
  FeatureMatrix fm;
  fm.tokens_ = std::move(tokens);
  fm.ids_ = std::move(ids);
  fm.l_title_ = l_title;
  fm.l_body_ = l_body;
  fm.use_body_ = use_body;
  for (Index r = 1; r < fm.rows(); ++r) {
    auto [it, inserted] = fm.index_.emplace(fm.ids_[static_cast<std::size_t>(r)], r);
    if (!inserted) throw Error(cat("duplicate news id: ", fm.ids_[static_cast<std::size_t>(r)]));
  }
  return fm;
}

Index FeatureMatrix::row_of(const std::string& news_id) const {
  auto it = index_.find(news_id);
  if (it == index_.end()) throw Error(cat("unknown news id: ", news_id));
  return it->second;
}

const std::string& FeatureMatrix::news_id(Index row) const {
  if (row < 0 || row >= rows()) throw Error(cat("feature row out of range: ", row));
  return ids_[static_cast<std::size_t>(row)];
}

bool FeatureMatrix::row_is_empty(Index row) const {
  return (tokens_.row(row).array() == 0).all();
}

IntMatrix FeatureMatrix::gather(const std::vector<Index>& rows) const {
  IntMatrix out(static_cast<Index>(rows.size()), width());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= this->rows()) throw Error(cat("feature row out of range: ", r));
    out.row(static_cast<Index>(i)) = tokens_.row(r);
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_ascii_alnum(c)) {
      current.push_back(to_lower_ascii(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<NewsRecord> parse_news_file(const std::string& path) {
  std::ifstream in = io::open_input(path, false);
  std::vector<NewsRecord> records;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() < 5) {
      throw Error(cat(path, ":", line_no, ": malformed news line, expected at least 5 ",
                      "tab-separated fields, got ", fields.size()));
    }
    NewsRecord record;
    record.news_id = fields[0];
    if (record.news_id.empty()) {
      throw Error(cat(path, ":", line_no, ": empty news id"));
    }
    if (!seen.emplace(record.news_id, line_no).second) {
      throw Error(cat(path, ":", line_no, ": duplicate news id: ", record.news_id));
    }
    record.category = fields[1];
    record.subcategory = fields[2];
    record.title_tokens = tokenize(fields[3]);
    record.body_tokens = tokenize(fields[4]);
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<ImpressionRecord> parse_behaviors_file(const std::string& path) {
  std::ifstream in = io::open_input(path, false);
  std::vector<ImpressionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> fields = split(line, '\t');
    if (fields.size() < 5) {
      throw Error(cat(path, ":", line_no, ": malformed behaviors line, expected at least 5 ",
                      "tab-separated fields, got ", fields.size()));
    }
    ImpressionRecord record;
    record.impression_id = fields[0];
    record.user_id = fields[1];
    record.timestamp = fields[2];
    record.history = split_ws(fields[3]);
    const std::vector<std::string> raw = split_ws(fields[4]);
    if (raw.empty()) {
      throw Error(cat(path, ":", line_no, ": impression has no candidates"));
    }
    for (const std::string& token : raw) {
      const std::size_t dash = token.rfind('-');
      if (dash == std::string::npos || dash == 0 || dash + 1 == token.size()) {
        throw Error(cat(path, ":", line_no, ": candidate '", token,
                        "' is not of the form newsid-label"));
      }
      const std::string label = token.substr(dash + 1);
      CandidateLabel candidate;
      candidate.news_id = token.substr(0, dash);
      if (label == "1") {
        candidate.label = 1;
      } else if (label == "0") {
        candidate.label = 0;
      } else {
        throw Error(cat(path, ":", line_no, ": candidate '", token, "' has label '", label,
                        "', expected 0 or 1"));
      }
      record.candidates.push_back(std::move(candidate));
    }
    records.push_back(std::move(record));
  }
  return records;
}

Vocabulary build_vocabulary(const std::vector<NewsRecord>& news, int min_count, Index max_size) {
  if (min_count < 1) throw Error(cat("min_count must be >= 1, got ", min_count));
  if (max_size <= 2) throw Error(cat("max vocabulary size must exceed 2, got ", max_size));

  std::unordered_map<std::string, std::int64_t> counts;
  for (const NewsRecord& record : news) {
    for (const std::string& token : record.title_tokens) ++counts[token];
    for (const std::string& token : record.body_tokens) ++counts[token];
  }

  std::vector<std::pair<std::string, std::int64_t>> ranked;
  ranked.reserve(counts.size());
  for (auto& entry : counts) {
    if (entry.second >= min_count) ranked.emplace_back(entry.first, entry.second);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  const std::size_t keep =
      std::min(ranked.size(), static_cast<std::size_t>(max_size) - 2);
  Vocabulary vocab;
  for (std::size_t i = 0; i < keep; ++i) vocab.add(ranked[i].first);
  return vocab;
}

EmbeddingMatrix load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                                           Index dim, Rng rng) {
  if (dim < 1) throw Error(cat("embedding dimension must be >= 1, got ", dim));
  EmbeddingMatrix table(vocab.size(), dim);
  // Seed every row first so a word's random fallback depends only on its
  // index, then overwrite rows found in the file.
  for (Index r = 0; r < table.rows(); ++r) {
    for (Index c = 0; c < dim; ++c) {
      table(r, c) = static_cast<float>(rng.uniform(-0.1, 0.1));
    }
  }

  std::ifstream in = io::open_input(path, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_ws(line);
    if (static_cast<Index>(fields.size()) != dim + 1) {
      throw Error(cat(path, ":", line_no, ": expected a word plus ", dim, " values, got ",
                      fields.size(), " fields"));
    }
    const Index row = vocab.contains(fields[0]) ? vocab.index_of(fields[0]) : -1;
    for (Index c = 0; c < dim; ++c) {
      double value = 0.0;
      if (!parse_double(fields[static_cast<std::size_t>(c) + 1], &value)) {
        throw Error(cat(path, ":", line_no, ": bad numeric value '",
                        fields[static_cast<std::size_t>(c) + 1], "'"));
      }
      if (row >= 0) table(row, c) = static_cast<float>(value);
    }
  }
  table.row(Vocabulary::kPad).setZero();
  return table;
}

FeatureMatrix build_feature_matrix(const std::vector<NewsRecord>& news, const Vocabulary& vocab,
                                   Index l_title, Index l_body, bool use_body) {
  if (l_title < 1) throw Error(cat("title length must be >= 1, got ", l_title));
  if (use_body && l_body < 1) {
    throw Error(cat("body length must be >= 1 when bodies are enabled, got ", l_body));
  }
  const Index width = l_title + (use_body ? l_body : 0);
  IntMatrix tokens = IntMatrix::Zero(static_cast<Index>(news.size()) + 1, width);
  std::vector<std::string> ids;
  ids.reserve(news.size() + 1);
  ids.emplace_back("<null>");
  for (std::size_t i = 0; i < news.size(); ++i) {
    const NewsRecord& record = news[i];
    const Index row = static_cast<Index>(i) + 1;
    ids.push_back(record.news_id);
    const Index title_n =
        std::min<Index>(l_title, static_cast<Index>(record.title_tokens.size()));
    for (Index t = 0; t < title_n; ++t) {
      tokens(row, t) = vocab.index_of(record.title_tokens[static_cast<std::size_t>(t)]);
    }
    if (use_body) {
      const Index body_n =
          std::min<Index>(l_body, static_cast<Index>(record.body_tokens.size()));
      for (Index t = 0; t < body_n; ++t) {
        tokens(row, l_title + t) = vocab.index_of(record.body_tokens[static_cast<std::size_t>(t)]);
      }
    }
  }
  return FeatureMatrix::from_rows(std::move(tokens), std::move(ids), l_title, use_body ? l_body : 0,
                                  use_body);
}

void write_news_file(const std::string& path, const std::vector<NewsRecord>& news) {
  std::ofstream out = io::open_output(path);
  for (const NewsRecord& record : news) {
    out << record.news_id << "\t" << record.category << "\t" << record.subcategory << "\t"
        << join(record.title_tokens, " ") << "\t" << join(record.body_tokens, " ") << "\n";
  }
  if (!out) throw Error(cat("failed writing ", path));
}

void write_behaviors_file(const std::string& path,
                          const std::vector<ImpressionRecord>& impressions) {
  std::ofstream out = io::open_output(path);
  for (const ImpressionRecord& imp : impressions) {
    out << imp.impression_id << "\t" << imp.user_id << "\t" << imp.timestamp << "\t"
        << join(imp.history, " ") << "\t";
    for (std::size_t c = 0; c < imp.candidates.size(); ++c) {
      if (c > 0) out << " ";
      out << imp.candidates[c].news_id << "-" << imp.candidates[c].label;
    }
    out << "\n";
  }
  if (!out) throw Error(cat("failed writing ", path));
}

}  // namespace newsrec::data
