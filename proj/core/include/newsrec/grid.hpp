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

#ifndef NEWSREC_GRID_HPP_
#define NEWSREC_GRID_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "newsrec/data_ingest.hpp"
#include "newsrec/metrics.hpp"
#include "newsrec/model_config.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/trainer.hpp"

// Exhaustive hyperparameter grid search. Axes are sorted by name and
// enumerated with the last axis varying fastest, so the cell order is a
// deterministic function of the spec alone. Every cell trains from the same
// seeded initialization; a failing cell is recorded and skipped. The winner
// is the best objective value, earlier cells winning ties.

namespace newsrec::train {

struct GridSpec {
  // hyperparameter name -> candidate values. Recognized names: epochs,
  // patience, batch_size, negatives, history_max, learning_rate (train side)
  // and heads, head_dim, attention_dim, topics, temperature, embedding_dim
  // (model side).
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  std::string objective = "auc";  // auc | mrr | ndcg5 | ndcg10
};

struct GridCell {
  std::vector<std::pair<std::string, double>> assignment;  // axis order
  bool ok = false;
  std::string error;            // failure reason when !ok
  double objective = 0;         // objective metric at the cell's best epoch
  eval::MetricsReport dev;      // dev metrics at the cell's best epoch
  int best_epoch = 0;
  std::string checkpoint;       // best checkpoint, when checkpointing is on
};

struct GridResult {
  std::string objective;
  std::vector<GridCell> cells;  // grid order; cells.size() = grid cardinality
  std::size_t failures = 0;
  int winner = -1;              // index into cells, -1 when every cell failed
};

namespace detail {

double metric_value(const eval::MetricsReport& report, const std::string& objective);

// Sorted axes plus upfront validation (known names, no duplicates, no empty
// candidate list). Throws Error with a nearest-name suggestion.
std::vector<std::pair<std::string, std::vector<double>>> normalize_axes(const GridSpec& grid);

// Applies one named value onto the pair of configs. Integer-valued settings
// reject fractional values. Throws Error on violation.
void apply_setting(const std::string& name, double value, TrainConfig& train_config,
                   model::ModelConfig& model_config);

std::string render_assignment(const std::vector<std::pair<std::string, double>>& assignment);

}  // namespace detail

// Deterministic text table of every cell, winner marked.
std::string render_grid_table(const GridResult& result);

template <class Real>
GridResult grid_search(const GridSpec& grid, const TrainConfig& base,
                       const model::ModelConfig& base_model,
                       const data::EmbeddingMatrix* pretrained,
                       const std::vector<batching::TrainingInstance>& instances,
                       const std::vector<data::ImpressionRecord>& dev,
                       const data::FeatureMatrix& features, Logger* logger = nullptr) {
  const auto axes = detail::normalize_axes(grid);
  if (grid.objective != "auc" && grid.objective != "mrr" && grid.objective != "ndcg5" &&
      grid.objective != "ndcg10") {
    throw Error(cat("unknown grid objective '", grid.objective,
                    "' (expected auc, mrr, ndcg5 or ndcg10)"));
  }

  std::size_t cardinality = 1;
  for (const auto& [name, values] : axes) cardinality *= values.size();

  GridResult result;
  result.objective = grid.objective;
  const std::uint64_t init_seed = mix_seed(base.seed, hash64("grid cell init"));

  for (std::size_t index = 0; index < cardinality; ++index) {
    GridCell cell;
    std::size_t rest = index;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto& [name, values] = axes[a];
      cell.assignment.emplace_back(name, values[rest % values.size()]);
      rest /= values.size();
    }
    std::reverse(cell.assignment.begin(), cell.assignment.end());

    try {
      TrainConfig config = base;
      model::ModelConfig model_config = base_model;
      for (const auto& [name, value] : cell.assignment) {
        detail::apply_setting(name, value, config, model_config);
      }
      model_config.validate();
      if (!base.checkpoint_dir.empty()) {
        config.checkpoint_dir = cat(base.checkpoint_dir, "/cell_", index);
      }

      model::Params<Real> params =
          model::Params<Real>::random_init(model_config, Rng(init_seed));
      if (pretrained != nullptr) params.set_embeddings(*pretrained);

      const TrainResult trained = train(params, config, instances, dev, features, logger);
      cell.ok = true;
      cell.best_epoch = trained.best_epoch;
      cell.checkpoint = trained.best_checkpoint;
      cell.dev = trained.epochs[static_cast<std::size_t>(trained.best_epoch - 1)].dev;
      cell.objective = detail::metric_value(cell.dev, grid.objective);
    } catch (const Error& e) {
      cell.ok = false;
      cell.error = e.what();
      ++result.failures;
    }

    if (logger) {
      std::vector<LogField> fields{field("cell", index),
                                   field("assignment", detail::render_assignment(cell.assignment))};
      if (cell.ok) {
        fields.push_back(field(grid.objective, cell.objective));
        fields.push_back(field("best_epoch", cell.best_epoch));
        logger->info("grid", "cell done", fields);
      } else {
        fields.push_back(field("error", cell.error));
        logger->warning("grid", "cell failed", fields);
      }
    }

    if (cell.ok &&
        (result.winner < 0 ||
         cell.objective > result.cells[static_cast<std::size_t>(result.winner)].objective)) {
      result.winner = static_cast<int>(index);
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

}  // namespace newsrec::train

#endif  // NEWSREC_GRID_HPP_
