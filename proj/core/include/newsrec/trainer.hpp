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

#ifndef NEWSREC_TRAINER_HPP_
#define NEWSREC_TRAINER_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "newsrec/batching.hpp"
#include "newsrec/checkpoint.hpp"
#include "newsrec/evaluator.hpp"
#include "newsrec/log.hpp"
#include "newsrec/model.hpp"
#include "newsrec/optimizer.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/types.hpp"

// Training loop: per epoch, one seeded-shuffle pass over the instances
// (forward, backward, Adam step per batch), then a dev evaluation. The best
// dev-AUC epoch is checkpointed; training stops once dev AUC has failed to
// improve for more than `patience` consecutive epochs.

namespace newsrec::train {

struct TrainConfig {
  int epochs = 5;
  batching::BatchPlan plan;  // plan.seed is ignored; see `seed`
  batching::Layout layout = batching::Layout::kConcat;
  double learning_rate = 1e-4;
  int patience = 2;           // epochs without dev-AUC improvement tolerated
  std::uint64_t seed = 1;     // drives the per-epoch shuffle (mixed per epoch)
  std::string checkpoint_dir; // empty: keep no checkpoints
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0;  // mean per-instance training loss over the epoch
  eval::MetricsReport dev;
  bool improved = false;  // dev AUC strictly above all previous epochs
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based; epoch the best checkpoint comes from
  double best_auc = 0;
  std::string best_checkpoint;  // empty when checkpoint_dir is empty
  bool stopped_early = false;
};

// Trains `params` in place (they end at the last epoch run; the best-epoch
// weights live in the checkpoint). Dev metrics use the same layout and
// history cap as training.
template <class Real>
TrainResult train(model::Params<Real>& params, const TrainConfig& config,
                  const std::vector<batching::TrainingInstance>& instances,
                  const std::vector<data::ImpressionRecord>& dev,
                  const data::FeatureMatrix& features, Logger* logger = nullptr) {
  if (config.epochs < 1) throw Error(cat("epochs must be >= 1, got ", config.epochs));
  if (config.patience < 0) throw Error(cat("patience must be >= 0, got ", config.patience));
  if (instances.empty()) throw Error("training set is empty");

  if (!config.checkpoint_dir.empty()) {
    std::filesystem::create_directories(config.checkpoint_dir);
  }

  OptimizerState<Real> optimizer = OptimizerState<Real>::init(params, config.learning_rate);
  model::Gradients<Real> grads = model::Gradients<Real>::zeros_like(params);

  eval::EvalOptions eval_options;
  eval_options.layout = config.layout;
  eval_options.history_max = config.plan.history_max;

  TrainResult result;
  int stale = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    batching::BatchPlan plan = config.plan;
    plan.shuffle = true;
    plan.seed = mix_seed(config.seed, static_cast<std::uint64_t>(epoch));
    batching::BatchStream stream(instances, features, plan, config.layout);

    double loss_sum = 0;
    std::size_t seen = 0;
    std::size_t batch_index = 0;
    while (!stream.done()) {
      const batching::Batch batch = stream.next();
      const std::size_t batch_instances = std::visit(
          [](const auto& b) { return static_cast<std::size_t>(b.batch); }, batch);
      try {
        model::BatchTrace<Real> trace;
        const model::ForwardResult<Real> out = model::forward(batch, params, &trace);
        if (!std::isfinite(static_cast<double>(out.loss))) {
          throw Error("non-finite loss");
        }
        grads.set_zero();
        model::backward(batch, params, trace, grads);
        adam_step(params, grads, optimizer);
        loss_sum += static_cast<double>(out.loss) * static_cast<double>(batch_instances);
      } catch (const Error& e) {
        throw Error(cat("epoch ", epoch, " batch ", batch_index, ": ", e.what()));
      }
      seen += batch_instances;
      ++batch_index;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_sum / static_cast<double>(seen);
    record.dev = eval::evaluate_model(params, dev, features, eval_options);
    record.improved = record.dev.auc > result.best_auc || result.best_epoch == 0;
    if (logger) {
      logger->info("train", "epoch",
                   {field("epoch", epoch), field("loss", record.loss),
                    field("auc", record.dev.auc), field("mrr", record.dev.mrr),
                    field("ndcg5", record.dev.ndcg5), field("ndcg10", record.dev.ndcg10),
                    field("improved", record.improved ? 1 : 0)});
    }

    if (record.improved) {
      result.best_epoch = epoch;
      result.best_auc = record.dev.auc;
      stale = 0;
      if (!config.checkpoint_dir.empty()) {
        const std::string path =
            cat(config.checkpoint_dir, "/epoch_", epoch, ".ckpt");
        save_checkpoint(params, config.seed, &optimizer, path);
        result.best_checkpoint = cat(config.checkpoint_dir, "/best.ckpt");
        save_checkpoint(params, config.seed, &optimizer, result.best_checkpoint);
      }
    } else {
      ++stale;
    }
    result.epochs.push_back(std::move(record));

    if (stale > config.patience) {
      result.stopped_early = true;
      if (logger) {
        logger->info("train", "early stop",
                     {field("epoch", epoch), field("best_epoch", result.best_epoch),
                      field("best_auc", result.best_auc)});
      }
      break;
    }
  }
  return result;
}

}  // namespace newsrec::train

#endif  // NEWSREC_TRAINER_HPP_
