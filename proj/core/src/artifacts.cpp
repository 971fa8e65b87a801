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

#include "newsrec/artifacts.hpp"

#include <fstream>

#include "newsrec/io.hpp"
#include "newsrec/strings.hpp"

namespace newsrec::artifacts {

namespace {

constexpr char kEmbeddingsMagic[8] = {'N', 'R', 'E', 'C', 'E', 'M', 'B', '1'};
constexpr char kFeaturesMagic[8] = {'N', 'R', 'E', 'C', 'F', 'E', 'A', '1'};

void check_magic(std::ifstream& in, const char (&magic)[8], const std::string& path) {
  char seen[8];
  io::read_bytes(in, seen, sizeof(seen), path);
  if (std::string_view(seen, 8) != std::string_view(magic, 8)) {
    throw Error(cat(path, ": unrecognized file header"));
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in = io::open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<Index> parse_row_list(const std::string& text, const std::string& context) {
  std::vector<Index> rows;
  for (const std::string& part : split_ws(text)) {
    long long value = 0;
    if (!parse_i64(part, &value)) {
      throw Error(cat(context, ": expected a row index, got '", part, "'"));
    }
    rows.push_back(static_cast<Index>(value));
  }
  return rows;
}

}  // namespace

void write_vocabulary(const std::string& path, const data::Vocabulary& vocab) {
  std::ofstream out = io::open_output(path);
  for (Index i = 0; i < vocab.size(); ++i) out << vocab.word(i) << "\n";
  if (!out) throw Error(cat("failed writing ", path));
}

data::Vocabulary read_vocabulary(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 2 || lines[0] != "<pad>" || lines[1] != "<unk>") {
    throw Error(cat(path, ": vocabulary must start with the <pad> and <unk> sentinels"));
  }
  data::Vocabulary vocab;
  for (std::size_t i = 2; i < lines.size(); ++i) vocab.add(lines[i]);
  return vocab;
}

void write_embeddings(const std::string& path, const data::EmbeddingMatrix& table) {
  std::ofstream out = io::open_output(path);
  io::write_bytes(out, kEmbeddingsMagic, sizeof(kEmbeddingsMagic));
  io::write_u32(out, static_cast<std::uint32_t>(table.rows()));
  io::write_u32(out, static_cast<std::uint32_t>(table.cols()));
  io::write_bytes(out, table.data(), sizeof(float) * static_cast<std::size_t>(table.size()));
  if (!out) throw Error(cat("failed writing ", path));
}

data::EmbeddingMatrix read_embeddings(const std::string& path) {
  std::ifstream in = io::open_input(path);
  check_magic(in, kEmbeddingsMagic, path);
  const std::uint32_t rows = io::read_u32(in, path);
  const std::uint32_t cols = io::read_u32(in, path);
  data::EmbeddingMatrix table(static_cast<Index>(rows), static_cast<Index>(cols));
  io::read_bytes(in, table.data(), sizeof(float) * static_cast<std::size_t>(table.size()), path);
  return table;
}

void write_features(const std::string& bin_path, const std::string& ids_path,
                    const data::FeatureMatrix& features) {
  std::ofstream out = io::open_output(bin_path);
  io::write_bytes(out, kFeaturesMagic, sizeof(kFeaturesMagic));
  io::write_u32(out, static_cast<std::uint32_t>(features.rows()));
  io::write_u32(out, static_cast<std::uint32_t>(features.width()));
  io::write_u32(out, static_cast<std::uint32_t>(features.l_title()));
  io::write_u32(out, static_cast<std::uint32_t>(features.l_body()));
  io::write_u32(out, features.use_body() ? 1 : 0);
  io::write_bytes(out, features.tokens().data(),
                  sizeof(Index) * static_cast<std::size_t>(features.tokens().size()));
  if (!out) throw Error(cat("failed writing ", bin_path));

  std::ofstream ids = io::open_output(ids_path);
  for (Index r = 0; r < features.rows(); ++r) ids << features.news_id(r) << "\n";
  if (!ids) throw Error(cat("failed writing ", ids_path));
}

data::FeatureMatrix read_features(const std::string& bin_path, const std::string& ids_path) {
  std::ifstream in = io::open_input(bin_path);
  check_magic(in, kFeaturesMagic, bin_path);
  const std::uint32_t rows = io::read_u32(in, bin_path);
  const std::uint32_t cols = io::read_u32(in, bin_path);
  const std::uint32_t l_title = io::read_u32(in, bin_path);
  const std::uint32_t l_body = io::read_u32(in, bin_path);
  const std::uint32_t use_body = io::read_u32(in, bin_path);
  IntMatrix tokens(static_cast<Index>(rows), static_cast<Index>(cols));
  io::read_bytes(in, tokens.data(), sizeof(Index) * static_cast<std::size_t>(tokens.size()),
                 bin_path);

  std::vector<std::string> ids = read_lines(ids_path);
  if (ids.size() != rows) {
    throw Error(cat(ids_path, ": ", ids.size(), " ids for ", rows, " feature rows"));
  }
  return data::FeatureMatrix::from_rows(std::move(tokens), std::move(ids),
                                        static_cast<Index>(l_title), static_cast<Index>(l_body),
                                        use_body != 0);
}

void write_instances(const std::string& path,
                     const std::vector<batching::TrainingInstance>& instances) {
  std::ofstream out = io::open_output(path);
  for (const batching::TrainingInstance& instance : instances) {
    for (std::size_t h = 0; h < instance.history.size(); ++h) {
      if (h > 0) out << " ";
      out << instance.history[h];
    }
    out << "\t";
    for (std::size_t c = 0; c < instance.candidates.size(); ++c) {
      if (c > 0) out << " ";
      out << instance.candidates[c];
    }
    out << "\t" << instance.positive_position << "\n";
  }
  if (!out) throw Error(cat("failed writing ", path));
}

std::vector<batching::TrainingInstance> read_instances(const std::string& path) {
  std::vector<batching::TrainingInstance> instances;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string context = cat(path, ":", i + 1);
    const std::vector<std::string> fields = split(lines[i], '\t');
    if (fields.size() != 3) {
      throw Error(cat(context, ": expected 3 tab-separated fields, got ", fields.size()));
    }
    batching::TrainingInstance instance;
    instance.history = parse_row_list(fields[0], context);
    instance.candidates = parse_row_list(fields[1], context);
    long long positive = 0;
    if (!parse_i64(fields[2], &positive) || positive < 0 ||
        positive >= static_cast<long long>(instance.candidates.size())) {
      throw Error(cat(context, ": positive position '", fields[2], "' is out of range"));
    }
    instance.positive_position = static_cast<Index>(positive);
    instances.push_back(std::move(instance));
  }
  return instances;
}

void write_meta(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out = io::open_output(path);
  for (const auto& [key, value] : entries) out << key << "=" << value << "\n";
  if (!out) throw Error(cat("failed writing ", path));
}

std::map<std::string, std::string> read_meta(const std::string& path) {
  std::map<std::string, std::string> meta;
  for (const std::string& line : read_lines(path)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error(cat(path, ": malformed line '", line, "'"));
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

DataDir load_data_dir(const std::string& dir) {
  DataDir out;
  out.vocab = read_vocabulary(cat(dir, "/", kVocabFile));
  out.embeddings = read_embeddings(cat(dir, "/", kEmbeddingsFile));
  out.features = read_features(cat(dir, "/", kFeaturesFile), cat(dir, "/", kFeatureIdsFile));
  out.instances = read_instances(cat(dir, "/", kInstancesFile));
  out.dev = data::parse_behaviors_file(cat(dir, "/", kDevFile));
  out.meta = read_meta(cat(dir, "/", kMetaFile));

  if (out.embeddings.rows() != out.vocab.size()) {
    throw Error(cat(dir, ": embedding table has ", out.embeddings.rows(), " rows but vocabulary has ",
                    out.vocab.size(), " words"));
  }
  for (const batching::TrainingInstance& instance : out.instances) {
    for (Index row : instance.history) {
      if (row < 0 || row >= out.features.rows()) {
        throw Error(cat(dir, ": instance references feature row ", row, " outside [0, ",
                        out.features.rows(), ")"));
      }
    }
    for (Index row : instance.candidates) {
      if (row < 0 || row >= out.features.rows()) {
        throw Error(cat(dir, ": instance references feature row ", row, " outside [0, ",
                        out.features.rows(), ")"));
      }
    }
  }
  return out;
}

}  // namespace newsrec::artifacts
