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

#ifndef NEWSREC_BATCHING_HPP_
#define NEWSREC_BATCHING_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "newsrec/data_ingest.hpp"
#include "newsrec/log.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/types.hpp"

namespace newsrec::batching {

// One training example: a user's clicked-news history plus one positive and
// K sampled negatives, all as feature-matrix row indices.
struct TrainingInstance {
  std::vector<Index> history;     // at most history_max rows, oldest first
  std::vector<Index> candidates;  // exactly 1 + negatives rows
  Index positive_position = 0;    // index of the positive within candidates
};

struct BatchPlan {
  Index batch_size = 32;
  Index negatives = 4;     // K
  Index history_max = 50;  // H
  bool shuffle = true;
  std::uint64_t seed = 0;
};

// Classic padded layout: every instance occupies history_max history slots;
// short histories are padded with the null news row and masked off.
struct ZeroPadBatch {
  Index batch = 0;        // B
  Index history_max = 0;  // H
  Index candidates = 0;   // 1 + K
  IntMatrix history_tokens;    // [B*H, L], padding slots are all-zero rows
  ByteMatrix history_mask;     // [B, H], 1 = real history entry
  IntMatrix candidate_tokens;  // [B*(1+K), L]
  std::vector<Index> labels;   // positive position per instance
  std::vector<Index> instance_ids;  // position in the source instance list
};

// Concatenation layout: no padding slots. Token rows referenced anywhere in
// the batch are deduplicated into unique_tokens; histories become index
// segments over it.
struct ConcatBatch {
  Index batch = 0;       // B
  Index candidates = 0;  // 1 + K
  IntMatrix unique_tokens;             // [U, L], no two rows identical
  std::vector<Index> unique_rows;      // feature row first interned at each slot
  std::vector<Index> history_index;    // T references into unique_tokens
  std::vector<Index> history_offsets;  // B+1 prefix offsets into history_index
  IntMatrix candidate_index;           // [B, 1+K] references into unique_tokens
  std::vector<Index> labels;
  std::vector<Index> instance_ids;
};

enum class Layout { kZeroPad, kConcat };

Layout parse_layout(const std::string& name);  // "zero_pad" | "concat"
const char* layout_name(Layout layout);

using Batch = std::variant<ZeroPadBatch, ConcatBatch>;

struct SampleStats {
  std::size_t instances = 0;
  std::size_t skipped_no_negative = 0;
  std::size_t skipped_no_positive = 0;
};

// Expands one impression into one instance per positive candidate.
//
// For each positive, in candidate order, draws come from `rng` in a fixed
// order so a given seed replays exactly:
//   1. negative selection: with N >= K negatives, a partial Fisher-Yates
//      over the negative list (K draws of below(N - i)); with 0 < N < K,
//      K independent draws of below(N) (sampling with replacement);
//   2. the positive's position: one draw of below(K + 1).
// History ids are mapped to feature rows, entries whose row is entirely
// padding are dropped, and the most recent history_max rows are kept.
// Impressions without negatives are skipped with a warning on `logger`;
// impressions without positives are skipped silently. Both show in `stats`.
std::vector<TrainingInstance> sample_training_instances(const data::ImpressionRecord& impression,
                                                        const data::FeatureMatrix& features,
                                                        Index negatives, Index history_max,
                                                        Rng& rng, Logger* logger = nullptr,
                                                        SampleStats* stats = nullptr);

// Convenience wrapper over a whole behaviors set.
std::vector<TrainingInstance> sample_training_instances(
    const std::vector<data::ImpressionRecord>& impressions, const data::FeatureMatrix& features,
    Index negatives, Index history_max, Rng& rng, Logger* logger = nullptr,
    SampleStats* stats = nullptr);

// Builders validate that every instance has exactly plan.negatives + 1
// candidates and at most plan.history_max history rows. `ids` optionally
// names each instance's position in the source list (defaults to 0..B-1).
ZeroPadBatch build_zero_pad_batch(std::span<const TrainingInstance> instances,
                                  const data::FeatureMatrix& features, const BatchPlan& plan,
                                  std::span<const Index> ids = {});
ConcatBatch build_concat_batch(std::span<const TrainingInstance> instances,
                               const data::FeatureMatrix& features, const BatchPlan& plan,
                               std::span<const Index> ids = {});

// Seeded, optionally shuffled batch stream over a fixed instance list. The
// instance-to-batch partition depends only on (plan, instance count), never
// on the layout, so both layouts see identical batches. The final short
// batch is kept.
class BatchStream {
 public:
  BatchStream(const std::vector<TrainingInstance>& instances, const data::FeatureMatrix& features,
              const BatchPlan& plan, Layout layout);

  std::size_t batch_count() const;
  // Visit order over instance indices (a permutation of 0..N-1).
  const std::vector<Index>& order() const { return order_; }

  bool done() const { return cursor_ >= order_.size(); }
  void reset() { cursor_ = 0; }
  Batch next();

 private:
  const std::vector<TrainingInstance>* instances_;
  const data::FeatureMatrix* features_;
  BatchPlan plan_;
  Layout layout_;
  std::vector<Index> order_;
  std::size_t cursor_ = 0;
};

// Text rendering of a batch for golden tests and debugging: one line per
// history segment plus token, candidate and label tables.
void dump_batch(const Batch& batch, std::ostream& out);

}  // namespace newsrec::batching

#endif  // NEWSREC_BATCHING_HPP_
