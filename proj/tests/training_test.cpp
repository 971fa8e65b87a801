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

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "newsrec/checkpoint.hpp"
#include "newsrec/grid.hpp"
#include "newsrec/optimizer.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/trainer.hpp"
#include "newsrec/types.hpp"
#include "oracles.hpp"

using namespace newsrec;
using doctest::Approx;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* tag) {
    path = std::filesystem::temp_directory_path() /
           cat("newsrec_test_", tag, "_", static_cast<unsigned long>(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

struct TinyWorld {
  model::ModelConfig config;
  data::FeatureMatrix features;
  std::vector<batching::TrainingInstance> instances;
  std::vector<data::ImpressionRecord> dev;
};

TinyWorld make_tiny_world(bool topic, std::uint64_t seed) {
  Rng rng(seed);
  TinyWorld world{oracles::tiny_model_config(topic),
                  oracles::tiny_features(12, 4, rng, 23),
                  oracles::tiny_instances(14, 12, 4, 2, rng),
                  {}};
  for (int i = 0; i < 6; ++i) {
    data::ImpressionRecord record;
    record.impression_id = cat("I", i);
    record.user_id = cat("U", i);
    for (int h = 0; h < 3; ++h) {
      record.history.push_back(cat("news", 1 + rng.index_below(11)));
    }
    for (int c = 0; c < 4; ++c) {
      record.candidates.push_back(
          {cat("news", 1 + rng.index_below(11)), c == 0 ? 1 : 0});
    }
    world.dev.push_back(std::move(record));
  }
  return world;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("adam matches the scalar reference update") {
  const model::ModelConfig config = oracles::tiny_model_config(true);
  Rng rng(31);
  auto params = model::Params<double>::random_init(config, rng);
  auto state = train::OptimizerState<double>::init(params, 1e-2, 0.9, 0.999, 1e-8);
  auto grads = model::Gradients<double>::zeros_like(params);

  // Track a handful of entries through several steps against the textbook
  // scalar recurrence.
  struct Tracked {
    std::size_t tensor;
    Index r, c;
    double value;
    oracles::AdamScalarState oracle;
  };
  const auto refs = params.registry();
  std::vector<Tracked> tracked = {{0, 3, 2, 0, {}}, {1, 0, 0, 0, {}}, {4, 0, 1, 0, {}},
                                  {7, 2, 0, 0, {}}, {refs.size() - 1, 1, 1, 0, {}}};
  for (auto& t : tracked) t.value = (*refs[t.tensor].tensor)(t.r, t.c);

  Rng grad_rng(77);
  for (long long step = 1; step <= 7; ++step) {
    for (const auto& ref : grads.registry()) {
      for (Index r = 0; r < ref.tensor->rows(); ++r) {
        for (Index c = 0; c < ref.tensor->cols(); ++c) {
          (*ref.tensor)(r, c) = grad_rng.uniform(-1.0, 1.0);
        }
      }
    }
    for (auto& t : tracked) {
      t.value = oracles::adam_scalar_step(t.value, (*grads.registry()[t.tensor].tensor)(t.r, t.c),
                                          t.oracle, step, 1e-2, 0.9, 0.999, 1e-8);
    }
    train::adam_step(params, grads, state);
    for (const auto& t : tracked) {
      CAPTURE(t.tensor);
      CHECK((*refs[t.tensor].tensor)(t.r, t.c) == Approx(t.value).epsilon(1e-12));
    }
  }
  CHECK(state.step == 7);
}

TEST_CASE("frozen embeddings never move and keep zero moments") {
  model::ModelConfig config = oracles::tiny_model_config(false);
  config.train_embedding = false;
  Rng rng(33);
  auto params = model::Params<double>::random_init(config, rng);
  const Matrix<double> before = params.embedding;
  auto state = train::OptimizerState<double>::init(params, 1e-2);
  auto grads = model::Gradients<double>::zeros_like(params);
  for (const auto& ref : grads.registry()) ref.tensor->setConstant(0.5);
  const Matrix<double> query_before = params.news_attention.query;
  train::adam_step(params, grads, state);
  CHECK((params.embedding.array() == before.array()).all());
  CHECK(state.m.front().isZero(0.0));
  CHECK(!(params.news_attention.query.array() == query_before.array()).all());
}

TEST_CASE("adam rejects mismatched gradient shapes") {
  const model::ModelConfig config = oracles::tiny_model_config(false);
  Rng rng(34);
  auto params = model::Params<double>::random_init(config, rng);
  auto state = train::OptimizerState<double>::init(params);
  auto grads = model::Gradients<double>::zeros_like(params);
  grads.embedding.resize(2, 2);
  CHECK_THROWS_WITH_AS(train::adam_step(params, grads, state),
                       doctest::Contains("embedding"), Error);
}

TEST_CASE("optimizer init validates hyperparameters") {
  const model::ModelConfig config = oracles::tiny_model_config(false);
  Rng rng(35);
  auto params = model::Params<double>::random_init(config, rng);
  CHECK_THROWS_WITH_AS(train::OptimizerState<double>::init(params, 0.0),
                       doctest::Contains("learning rate"), Error);
  CHECK_THROWS_WITH_AS(train::OptimizerState<double>::init(params, 1e-4, 1.0),
                       doctest::Contains("betas"), Error);
  CHECK_THROWS_WITH_AS(train::OptimizerState<double>::init(params, 1e-4, 0.9, 0.999, 0.0),
                       doctest::Contains("epsilon"), Error);
}

TEST_CASE("checkpoints round-trip f32 parameters and optimizer state exactly") {
  TempDir dir("ckpt");
  const model::ModelConfig config = oracles::tiny_model_config(true);
  Rng rng(41);
  auto params = model::Params<float>::random_init(config, rng);
  auto state = train::OptimizerState<float>::init(params, 3e-3);
  auto grads = model::Gradients<float>::zeros_like(params);
  for (const auto& ref : grads.registry()) ref.tensor->setConstant(0.25f);
  train::adam_step(params, grads, state);
  train::adam_step(params, grads, state);

  const std::string path = dir.str() + "/model.ckpt";
  train::save_checkpoint(params, 99, &state, path);
  const auto loaded = train::load_checkpoint<float>(path);

  CHECK(loaded.seed == 99);
  CHECK(loaded.params.config.variant == model::Variant::kTopicAttention);
  CHECK(loaded.params.config.vocab_size == config.vocab_size);
  const auto got = loaded.params.registry();
  const auto want = params.registry();
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].name == want[i].name);
    CHECK((got[i].tensor->array() == want[i].tensor->array()).all());
  }
  REQUIRE(loaded.optimizer.has_value());
  CHECK(loaded.optimizer->step == 2);
  CHECK(loaded.optimizer->learning_rate == 3e-3);
  for (std::size_t i = 0; i < state.m.size(); ++i) {
    CHECK((loaded.optimizer->m[i].array() == state.m[i].array()).all());
    CHECK((loaded.optimizer->v[i].array() == state.v[i].array()).all());
  }

  SUBCASE("without optimizer state") {
    const std::string bare = dir.str() + "/bare.ckpt";
    train::save_checkpoint(params, 7, static_cast<train::OptimizerState<float>*>(nullptr), bare);
    const auto again = train::load_checkpoint<float>(bare);
    CHECK(!again.optimizer.has_value());
    CHECK(again.seed == 7);
  }

  SUBCASE("rejects files with the wrong magic") {
    const std::string bogus = dir.str() + "/bogus.ckpt";
    io::write_text_file(bogus, "definitely not a checkpoint");
    CHECK_THROWS_WITH_AS(train::load_checkpoint<float>(bogus),
                         doctest::Contains("not a checkpoint"), Error);
  }

  SUBCASE("rejects truncated files") {
    std::string bytes = io::read_text_file(path);
    bytes.resize(bytes.size() / 2);
    const std::string cut = dir.str() + "/cut.ckpt";
    io::write_text_file(cut, bytes);
    CHECK_THROWS_AS(train::load_checkpoint<float>(cut), Error);
  }
}

TEST_CASE("f64 parameters pass through the f32 on-disk precision") {
  // Values are stored in f32, whatever the in-memory precision: a double
  // tensor comes back as its float-rounded self, readable at either width.
  TempDir dir("ckpt64");
  const model::ModelConfig config = oracles::tiny_model_config(false);
  Rng rng(43);
  auto params = model::Params<double>::random_init(config, rng);
  const std::string path = dir.str() + "/f64.ckpt";
  train::save_checkpoint(params, 5, static_cast<train::OptimizerState<double>*>(nullptr), path);
  const auto loaded = train::load_checkpoint<double>(path);
  for (Index r = 0; r < params.embedding.rows(); ++r) {
    for (Index c = 0; c < params.embedding.cols(); ++c) {
      CHECK(loaded.params.embedding(r, c) ==
            static_cast<double>(static_cast<float>(params.embedding(r, c))));
    }
  }
  const auto as_float = train::load_checkpoint<float>(path);
  CHECK(as_float.params.embedding(1, 0) == static_cast<float>(params.embedding(1, 0)));
}

TEST_CASE("training stops after patience epochs without improvement") {
  // A vanishing learning rate freezes the model, so dev AUC repeats exactly:
  // only the first epoch counts as improved and the stop fires on schedule.
  TinyWorld world = make_tiny_world(false, 51);
  Rng rng(52);
  auto params = model::Params<double>::random_init(world.config, rng);
  train::TrainConfig config;
  config.epochs = 8;
  config.plan.batch_size = 8;
  config.plan.negatives = 2;
  config.plan.history_max = 4;
  config.learning_rate = 1e-300;
  config.patience = 1;
  config.seed = 9;
  const auto result =
      train::train(params, config, world.instances, world.dev, world.features);
  CHECK(result.best_epoch == 1);
  CHECK(result.stopped_early);
  CHECK(result.epochs.size() == 3);  // baseline epoch + patience + the stopping one
  CHECK(result.epochs[0].improved);
  CHECK(!result.epochs[1].improved);
  CHECK(!result.epochs[2].improved);
  CHECK(result.epochs[0].dev.auc == Approx(result.epochs[2].dev.auc).epsilon(1e-15));
  CHECK(result.best_checkpoint.empty());
}

TEST_CASE("training runs every epoch when the budget is exhausted first") {
  TinyWorld world = make_tiny_world(true, 53);
  Rng rng(54);
  auto params = model::Params<double>::random_init(world.config, rng);
  train::TrainConfig config;
  config.epochs = 2;
  config.plan.batch_size = 8;
  config.plan.negatives = 2;
  config.plan.history_max = 4;
  config.learning_rate = 1e-3;
  config.patience = 5;
  config.seed = 11;
  const auto result =
      train::train(params, config, world.instances, world.dev, world.features);
  CHECK(result.epochs.size() == 2);
  CHECK(!result.stopped_early);
  CHECK(result.best_epoch >= 1);
  for (const auto& record : result.epochs) {
    CHECK(std::isfinite(record.loss));
    CHECK(record.dev.evaluated == 6);
  }
}

TEST_CASE("best checkpoint restores the best epoch's parameters") {
  // f32 end to end, so the restored weights match the trained ones exactly.
  TempDir dir("train");
  TinyWorld world = make_tiny_world(false, 55);
  Rng rng(56);
  auto params = model::Params<float>::random_init(world.config, rng);
  train::TrainConfig config;
  config.epochs = 3;
  config.plan.batch_size = 8;
  config.plan.negatives = 2;
  config.plan.history_max = 4;
  config.learning_rate = 1e-3;
  config.patience = 5;
  config.seed = 13;
  config.checkpoint_dir = dir.str();
  const auto result =
      train::train(params, config, world.instances, world.dev, world.features);
  REQUIRE(result.best_epoch >= 1);
  REQUIRE(!result.best_checkpoint.empty());
  CHECK(std::filesystem::exists(result.best_checkpoint));
  CHECK(std::filesystem::exists(dir.path / cat("epoch_", result.best_epoch, ".ckpt")));

  const auto best = train::load_checkpoint<float>(result.best_checkpoint);
  const auto epoch_copy =
      train::load_checkpoint<float>((dir.path / cat("epoch_", result.best_epoch, ".ckpt")).string());
  CHECK((best.params.embedding.array() == epoch_copy.params.embedding.array()).all());

  // Re-evaluating the restored weights reproduces the recorded best AUC.
  eval::EvalOptions options;
  options.layout = config.layout;
  options.history_max = config.plan.history_max;
  const auto report = eval::evaluate_model(best.params, world.dev, world.features, options);
  CHECK(report.auc == Approx(result.best_auc).epsilon(1e-12));
}

TEST_CASE("trainer rejects bad configurations") {
  TinyWorld world = make_tiny_world(false, 57);
  Rng rng(58);
  auto params = model::Params<double>::random_init(world.config, rng);
  train::TrainConfig config;
  config.plan.negatives = 2;
  config.plan.history_max = 4;
  SUBCASE("epochs") {
    config.epochs = 0;
    CHECK_THROWS_WITH_AS(
        train::train(params, config, world.instances, world.dev, world.features),
        doctest::Contains("epochs"), Error);
  }
  SUBCASE("patience") {
    config.patience = -1;
    CHECK_THROWS_WITH_AS(
        train::train(params, config, world.instances, world.dev, world.features),
        doctest::Contains("patience"), Error);
  }
  SUBCASE("empty training set") {
    CHECK_THROWS_WITH_AS(
        train::train(params, config, {}, world.dev, world.features),
        doctest::Contains("training set is empty"), Error);
  }
}

TEST_CASE("grid cells enumerate sorted axes with the last axis fastest") {
  TinyWorld world = make_tiny_world(false, 61);
  train::TrainConfig base;
  base.epochs = 1;
  base.plan.batch_size = 8;
  base.plan.negatives = 2;
  base.plan.history_max = 4;
  base.seed = 3;
  train::GridSpec grid;
  // Deliberately unsorted: "learning_rate" sorts after "epochs".
  grid.axes = {{"learning_rate", {1e-3, 1e-4}}, {"epochs", {1, 2}}};
  const auto result = train::grid_search<double>(grid, base, world.config, nullptr,
                                                 world.instances, world.dev, world.features);
  REQUIRE(result.cells.size() == 4);
  CHECK(result.failures == 0);
  const auto& cells = result.cells;
  for (const auto& cell : cells) {
    REQUIRE(cell.assignment.size() == 2);
    CHECK(cell.assignment[0].first == "epochs");
    CHECK(cell.assignment[1].first == "learning_rate");
    CHECK(cell.ok);
  }
  CHECK(cells[0].assignment[0].second == 1);
  CHECK(cells[0].assignment[1].second == 1e-3);
  CHECK(cells[1].assignment[0].second == 1);
  CHECK(cells[1].assignment[1].second == 1e-4);
  CHECK(cells[2].assignment[0].second == 2);
  CHECK(cells[2].assignment[1].second == 1e-3);
  CHECK(cells[3].assignment[0].second == 2);
  CHECK(cells[3].assignment[1].second == 1e-4);
  CHECK(result.winner >= 0);

  const std::string table = render_grid_table(result);
  CHECK(table.find("epochs=1 learning_rate=0.001") != std::string::npos);
  CHECK(table.find(" *") != std::string::npos);
  CHECK(table.find("best_epoch") != std::string::npos);
}

TEST_CASE("grid ties go to the earliest cell") {
  // Two learning rates too small to move anything give identical dev metrics.
  TinyWorld world = make_tiny_world(false, 63);
  train::TrainConfig base;
  base.epochs = 1;
  base.plan.batch_size = 8;
  base.plan.negatives = 2;
  base.plan.history_max = 4;
  base.seed = 5;
  train::GridSpec grid;
  grid.axes = {{"learning_rate", {1e-300, 1e-299}}};
  const auto result = train::grid_search<double>(grid, base, world.config, nullptr,
                                                 world.instances, world.dev, world.features);
  REQUIRE(result.cells.size() == 2);
  CHECK(result.cells[0].objective == Approx(result.cells[1].objective).epsilon(1e-15));
  CHECK(result.winner == 0);
}

TEST_CASE("a failing grid cell is recorded without sinking the sweep") {
  TinyWorld world = make_tiny_world(false, 65);
  train::TrainConfig base;
  base.epochs = 1;
  base.plan.batch_size = 8;
  base.plan.negatives = 2;
  base.plan.history_max = 4;
  train::GridSpec grid;
  grid.axes = {{"epochs", {1.5, 1.0}}};  // 1.5 is not a whole number of epochs
  const auto result = train::grid_search<double>(grid, base, world.config, nullptr,
                                                 world.instances, world.dev, world.features);
  REQUIRE(result.cells.size() == 2);
  CHECK(result.failures == 1);
  CHECK(!result.cells[0].ok);
  CHECK(result.cells[0].error.find("epochs") != std::string::npos);
  CHECK(result.cells[1].ok);
  CHECK(result.winner == 1);
  CHECK(render_grid_table(result).find("failed:") != std::string::npos);
}

TEST_CASE("grid validation catches bad axes and objectives") {
  TinyWorld world = make_tiny_world(false, 67);
  train::TrainConfig base;
  base.plan.negatives = 2;
  base.plan.history_max = 4;
  SUBCASE("unknown axis suggests the nearest name") {
    train::GridSpec grid;
    grid.axes = {{"heds", {2}}};
    CHECK_THROWS_WITH_AS(
        train::grid_search<double>(grid, base, world.config, nullptr, world.instances,
                                   world.dev, world.features),
        doctest::Contains("heads"), Error);
  }
  SUBCASE("duplicate axis") {
    train::GridSpec grid;
    grid.axes = {{"epochs", {1}}, {"epochs", {2}}};
    CHECK_THROWS_WITH_AS(
        train::grid_search<double>(grid, base, world.config, nullptr, world.instances,
                                   world.dev, world.features),
        doctest::Contains("duplicate"), Error);
  }
  SUBCASE("empty candidate list") {
    train::GridSpec grid;
    grid.axes = {{"epochs", {}}};
    CHECK_THROWS_AS(
        train::grid_search<double>(grid, base, world.config, nullptr, world.instances,
                                   world.dev, world.features),
        Error);
  }
  SUBCASE("unknown objective") {
    train::GridSpec grid;
    grid.axes = {{"epochs", {1}}};
    grid.objective = "f1";
    CHECK_THROWS_WITH_AS(
        train::grid_search<double>(grid, base, world.config, nullptr, world.instances,
                                   world.dev, world.features),
        doctest::Contains("objective"), Error);
  }
}

TEST_CASE("grid cells share one seeded initialization") {
  // Identical assignments in separate sweeps must land on identical metrics,
  // which can only happen when every cell starts from the same init.
  TinyWorld world = make_tiny_world(false, 69);
  train::TrainConfig base;
  base.epochs = 1;
  base.plan.batch_size = 8;
  base.plan.negatives = 2;
  base.plan.history_max = 4;
  base.seed = 21;
  train::GridSpec lone;
  lone.axes = {{"learning_rate", {1e-3}}};
  train::GridSpec paired;
  paired.axes = {{"learning_rate", {5e-3, 1e-3}}};
  const auto single = train::grid_search<double>(lone, base, world.config, nullptr,
                                                 world.instances, world.dev, world.features);
  const auto pair = train::grid_search<double>(paired, base, world.config, nullptr,
                                               world.instances, world.dev, world.features);
  REQUIRE(single.cells.size() == 1);
  REQUIRE(pair.cells.size() == 2);
  CHECK(single.cells[0].objective == Approx(pair.cells[1].objective).epsilon(1e-15));
}

}  // TEST_SUITE
