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

#include "newsrec/batching.hpp"

#include <algorithm>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "newsrec/strings.hpp"

namespace newsrec::batching {

Layout parse_layout(const std::string& name) {
  if (name == "zero_pad") return Layout::kZeroPad;
  if (name == "concat") return Layout::kConcat;
  throw Error(cat("unknown layout '", name, "', expected zero_pad or concat"));
}

const char* layout_name(Layout layout) {
  return layout == Layout::kZeroPad ? "zero_pad" : "concat";
}

std::vector<TrainingInstance> sample_training_instances(const data::ImpressionRecord& impression,
                                                        const data::FeatureMatrix& features,
                                                        Index negatives, Index history_max,
                                                        Rng& rng, Logger* logger,
                                                        SampleStats* stats) {
  if (negatives < 1) throw Error(cat("negatives per instance must be >= 1, got ", negatives));
  if (history_max < 1) throw Error(cat("history_max must be >= 1, got ", history_max));

  std::vector<Index> positive_rows;
  std::vector<Index> negative_rows;
  for (const data::CandidateLabel& candidate : impression.candidates) {
    const Index row = features.row_of(candidate.news_id);
    (candidate.label == 1 ? positive_rows : negative_rows).push_back(row);
  }

  if (positive_rows.empty()) {
    if (stats) ++stats->skipped_no_positive;
    return {};
  }
  if (negative_rows.empty()) {
    if (logger) {
      logger->warning("batching", "impression has no negative candidates, skipped",
                      {field("impression", impression.impression_id)});
    }
    if (stats) ++stats->skipped_no_negative;
    return {};
  }

  // Shared history: map, drop empty rows, keep the most recent history_max.
  std::vector<Index> history;
  for (const std::string& id : impression.history) {
    const Index row = features.row_of(id);
    if (!features.row_is_empty(row)) history.push_back(row);
  }
  if (static_cast<Index>(history.size()) > history_max) {
    history.erase(history.begin(), history.end() - history_max);
  }

  const Index n = static_cast<Index>(negative_rows.size());
  std::vector<TrainingInstance> out;
  out.reserve(positive_rows.size());
  for (const Index positive : positive_rows) {
    std::vector<Index> chosen;
    chosen.reserve(static_cast<std::size_t>(negatives));
    if (n >= negatives) {
      std::vector<Index> pool = negative_rows;
      for (Index i = 0; i < negatives; ++i) {
        const Index j = i + rng.index_below(n - i);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        chosen.push_back(pool[static_cast<std::size_t>(i)]);
      }
    } else {
      for (Index i = 0; i < negatives; ++i) {
        chosen.push_back(negative_rows[static_cast<std::size_t>(rng.index_below(n))]);
      }
    }
    const Index position = rng.index_below(negatives + 1);

    TrainingInstance instance;
    instance.history = history;
    instance.candidates = std::move(chosen);
    instance.candidates.insert(instance.candidates.begin() + position, positive);
    instance.positive_position = position;
    out.push_back(std::move(instance));
  }
  if (stats) stats->instances += out.size();
  return out;
}

std::vector<TrainingInstance> sample_training_instances(
    const std::vector<data::ImpressionRecord>& impressions, const data::FeatureMatrix& features,
    Index negatives, Index history_max, Rng& rng, Logger* logger, SampleStats* stats) {
  std::vector<TrainingInstance> out;
  for (const data::ImpressionRecord& impression : impressions) {
    std::vector<TrainingInstance> part =
        sample_training_instances(impression, features, negatives, history_max, rng, logger, stats);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

namespace {

void validate_instances(std::span<const TrainingInstance> instances, const BatchPlan& plan) {
  if (instances.empty()) throw Error("cannot build a batch from zero instances");
  const Index candidates = plan.negatives + 1;
  for (std::size_t b = 0; b < instances.size(); ++b) {
    const TrainingInstance& instance = instances[b];
    if (static_cast<Index>(instance.candidates.size()) != candidates) {
      throw Error(cat("instance ", b, " has ", instance.candidates.size(), " candidates, plan ",
                      "expects ", candidates));
    }
    if (static_cast<Index>(instance.history.size()) > plan.history_max) {
      throw Error(cat("instance ", b, " has ", instance.history.size(),
                      " history rows, plan allows ", plan.history_max));
    }
    if (instance.positive_position < 0 || instance.positive_position >= candidates) {
      throw Error(cat("instance ", b, " has positive position ", instance.positive_position,
                      " outside [0, ", candidates, ")"));
    }
  }
}

std::vector<Index> default_ids(std::size_t count) {
  std::vector<Index> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = static_cast<Index>(i);
  return ids;
}

}  // namespace

ZeroPadBatch build_zero_pad_batch(std::span<const TrainingInstance> instances,
                                  const data::FeatureMatrix& features, const BatchPlan& plan,
                                  std::span<const Index> ids) {
  validate_instances(instances, plan);
  const Index b_count = static_cast<Index>(instances.size());
  const Index h_max = plan.history_max;
  const Index candidates = plan.negatives + 1;
  const Index width = features.width();

  ZeroPadBatch batch;
  batch.batch = b_count;
  batch.history_max = h_max;
  batch.candidates = candidates;
  batch.history_tokens = IntMatrix::Zero(b_count * h_max, width);
  batch.history_mask = ByteMatrix::Zero(b_count, h_max);
  batch.candidate_tokens = IntMatrix(b_count * candidates, width);
  batch.labels.reserve(static_cast<std::size_t>(b_count));
  batch.instance_ids = ids.empty() ? default_ids(instances.size())
                                   : std::vector<Index>(ids.begin(), ids.end());

  for (Index b = 0; b < b_count; ++b) {
    const TrainingInstance& instance = instances[static_cast<std::size_t>(b)];
    const Index h = static_cast<Index>(instance.history.size());
    for (Index s = 0; s < h; ++s) {
      batch.history_tokens.row(b * h_max + s) =
          features.tokens().row(instance.history[static_cast<std::size_t>(s)]);
      batch.history_mask(b, s) = 1;
    }
    for (Index c = 0; c < candidates; ++c) {
      batch.candidate_tokens.row(b * candidates + c) =
          features.tokens().row(instance.candidates[static_cast<std::size_t>(c)]);
    }
    batch.labels.push_back(instance.positive_position);
  }
  return batch;
}

ConcatBatch build_concat_batch(std::span<const TrainingInstance> instances,
                               const data::FeatureMatrix& features, const BatchPlan& plan,
                               std::span<const Index> ids) {
  validate_instances(instances, plan);
  const Index b_count = static_cast<Index>(instances.size());
  const Index candidates = plan.negatives + 1;
  const Index width = features.width();

  ConcatBatch batch;
  batch.batch = b_count;
  batch.candidates = candidates;
  batch.candidate_index = IntMatrix(b_count, candidates);
  batch.history_offsets.reserve(static_cast<std::size_t>(b_count) + 1);
  batch.history_offsets.push_back(0);
  batch.instance_ids = ids.empty() ? default_ids(instances.size())
                                   : std::vector<Index>(ids.begin(), ids.end());

  // Token rows are interned by content, in first-reference order (history
  // rows of instance 0, then its candidates, then instance 1, ...). Keying
  // by content rather than feature row guarantees no two unique rows are
  // identical even if distinct news share a token row.
  std::unordered_map<std::string_view, Index> interned;
  const auto intern = [&](Index feature_row) {
    const auto* begin =
        reinterpret_cast<const char*>(features.tokens().row(feature_row).data());
    const std::string_view key(begin, static_cast<std::size_t>(width) * sizeof(std::int32_t));
    auto [it, inserted] = interned.emplace(key, static_cast<Index>(batch.unique_rows.size()));
    if (inserted) batch.unique_rows.push_back(feature_row);
    return it->second;
  };

  for (Index b = 0; b < b_count; ++b) {
    const TrainingInstance& instance = instances[static_cast<std::size_t>(b)];
    for (const Index row : instance.history) batch.history_index.push_back(intern(row));
    batch.history_offsets.push_back(static_cast<Index>(batch.history_index.size()));
    for (Index c = 0; c < candidates; ++c) {
      batch.candidate_index(b, c) = intern(instance.candidates[static_cast<std::size_t>(c)]);
    }
    batch.labels.push_back(instance.positive_position);
  }

  batch.unique_tokens = features.gather(batch.unique_rows);
  return batch;
}

BatchStream::BatchStream(const std::vector<TrainingInstance>& instances,
                         const data::FeatureMatrix& features, const BatchPlan& plan, Layout layout)
    : instances_(&instances), features_(&features), plan_(plan), layout_(layout) {
  if (plan.batch_size < 1) throw Error(cat("batch size must be >= 1, got ", plan.batch_size));
  order_.resize(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) order_[i] = static_cast<Index>(i);
  if (plan.shuffle) {
    Rng rng(plan.seed);
    rng.shuffle(order_);
  }
}

std::size_t BatchStream::batch_count() const {
  const std::size_t b = static_cast<std::size_t>(plan_.batch_size);
  return (order_.size() + b - 1) / b;
}

Batch BatchStream::next() {
  if (done()) throw Error("batch stream exhausted; call reset() to rewind");
  const std::size_t take =
      std::min(static_cast<std::size_t>(plan_.batch_size), order_.size() - cursor_);
  std::vector<TrainingInstance> picked;
  picked.reserve(take);
  std::vector<Index> ids;
  ids.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const Index idx = order_[cursor_ + i];
    picked.push_back((*instances_)[static_cast<std::size_t>(idx)]);
    ids.push_back(idx);
  }
  cursor_ += take;
  if (layout_ == Layout::kZeroPad) {
    return build_zero_pad_batch(picked, *features_, plan_, ids);
  }
  return build_concat_batch(picked, *features_, plan_, ids);
}

namespace {

void dump_token_row(const IntMatrix& tokens, Index row, std::ostream& out) {
  for (Index c = 0; c < tokens.cols(); ++c) {
    if (c > 0) out << ',';
    out << tokens(row, c);
  }
}

void dump_zero_pad(const ZeroPadBatch& batch, std::ostream& out) {
  out << "layout=zero_pad batch=" << batch.batch << " history_max=" << batch.history_max
      << " candidates=" << batch.candidates << "\n";
  for (Index b = 0; b < batch.batch; ++b) {
    out << "segment " << b << " mask=";
    for (Index s = 0; s < batch.history_max; ++s) out << int(batch.history_mask(b, s));
    out << "\n";
    for (Index s = 0; s < batch.history_max; ++s) {
      out << "  slot " << s << ": ";
      dump_token_row(batch.history_tokens, b * batch.history_max + s, out);
      out << "\n";
    }
  }
  for (Index b = 0; b < batch.batch; ++b) {
    for (Index c = 0; c < batch.candidates; ++c) {
      out << "candidate " << b << "/" << c << ": ";
      dump_token_row(batch.candidate_tokens, b * batch.candidates + c, out);
      out << "\n";
    }
  }
  out << "labels:";
  for (const Index label : batch.labels) out << ' ' << label;
  out << "\n";
}

void dump_concat(const ConcatBatch& batch, std::ostream& out) {
  out << "layout=concat batch=" << batch.batch << " candidates=" << batch.candidates
      << " unique=" << batch.unique_tokens.rows() << "\n";
  for (Index u = 0; u < batch.unique_tokens.rows(); ++u) {
    out << "unique " << u << ": ";
    dump_token_row(batch.unique_tokens, u, out);
    out << "\n";
  }
  for (Index b = 0; b < batch.batch; ++b) {
    out << "segment " << b << ":";
    for (Index t = batch.history_offsets[static_cast<std::size_t>(b)];
         t < batch.history_offsets[static_cast<std::size_t>(b) + 1]; ++t) {
      out << ' ' << batch.history_index[static_cast<std::size_t>(t)];
    }
    out << "\n";
  }
  for (Index b = 0; b < batch.batch; ++b) {
    out << "candidates " << b << ":";
    for (Index c = 0; c < batch.candidates; ++c) out << ' ' << batch.candidate_index(b, c);
    out << "\n";
  }
  out << "labels:";
  for (const Index label : batch.labels) out << ' ' << label;
  out << "\n";
}

}  // namespace

void dump_batch(const Batch& batch, std::ostream& out) {
  if (const auto* zero_pad = std::get_if<ZeroPadBatch>(&batch)) {
    dump_zero_pad(*zero_pad, out);
  } else {
    dump_concat(std::get<ConcatBatch>(batch), out);
  }
}

}  // namespace newsrec::batching
