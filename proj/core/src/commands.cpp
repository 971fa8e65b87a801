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

#include "newsrec/commands.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "newsrec/artifacts.hpp"
#include "newsrec/batching.hpp"
#include "newsrec/checkpoint.hpp"
#include "newsrec/config.hpp"
#include "newsrec/data_ingest.hpp"
#include "newsrec/evaluator.hpp"
#include "newsrec/explanation.hpp"
#include "newsrec/grid.hpp"
#include "newsrec/log.hpp"
#include "newsrec/metrics.hpp"
#include "newsrec/model_config.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/throughput.hpp"
#include "newsrec/trainer.hpp"
#include "newsrec/types.hpp"

namespace newsrec::cli {
namespace {

bool wants_help(std::span<const std::string> args) {
  for (const std::string& arg : args) {
    if (arg == "--help" || arg == "-h") return true;
  }
  return false;
}

// Shared command skeleton: --help short-circuits to the schema listing;
// any Error becomes one structured stderr record and exit code 1.
int run_command(const char* name, std::span<const std::string> args,
                const config::Schema& schema,
                const std::function<void(const config::Config&, Logger&)>& body) {
  if (wants_help(args)) {
    std::cout << "usage: newsrec " << name << " [--key value]... [--config file]\n\n"
              << schema.describe();
    return 0;
  }
  Logger logger;
  try {
    config::Config cfg = config::parse_config(schema, args);
    cfg.check_required();
    body(cfg, logger);
  } catch (const Error& e) {
    logger.error(name, e.what());
    return 1;
  } catch (const std::exception& e) {
    logger.error(name, e.what());
    return 1;
  }
  return logger.error_count() == 0 ? 0 : 1;
}

// One "setting" record per key so a run log pins down the full resolved
// configuration and where each value came from.
void log_settings(Logger& logger, const char* name, const config::Config& cfg) {
  for (const config::Setting& setting : cfg.schema().settings()) {
    std::string value;
    switch (setting.kind) {
      case config::Kind::kInt: value = cat(cfg.get_int(setting.key)); break;
      case config::Kind::kReal: value = format_real(cfg.get_real(setting.key)); break;
      case config::Kind::kBool: value = cfg.get_bool(setting.key) ? "true" : "false"; break;
      case config::Kind::kString: value = cfg.get_string(setting.key); break;
    }
    logger.info(name, "setting",
                {field("key", setting.key), field("value", value),
                 field("source", config::provenance_name(cfg.provenance(setting.key)))});
  }
}

void open_log(Logger& logger, const config::Config& cfg, const std::string& fallback) {
  std::string path = cfg.get_string("log_file");
  if (path.empty()) path = fallback;
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  logger.open_run_file(path);
}

long long meta_int(const std::map<std::string, std::string>& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw Error(cat("meta.txt is missing key '", key, "'"));
  long long value = 0;
  if (!parse_i64(it->second, &value)) {
    throw Error(cat("meta key ", key, " is not an integer: ", it->second));
  }
  return value;
}

// Int setting that falls back to a meta.txt entry while left at its default.
Index resolve_from_meta(const config::Config& cfg, const std::string& key,
                        const std::map<std::string, std::string>& meta) {
  if (cfg.is_default(key)) return static_cast<Index>(meta_int(meta, key));
  return static_cast<Index>(cfg.get_int(key));
}

// All-random table used when no pretrained vector file is given; same draw
// policy as the missing-word rows of the pretrained loader.
data::EmbeddingMatrix random_embedding_table(const data::Vocabulary& vocab, Index dim, Rng rng) {
  data::EmbeddingMatrix table(vocab.size(), dim);
  for (Index r = 0; r < table.rows(); ++r) {
    for (Index c = 0; c < dim; ++c) {
      table(r, c) = static_cast<float>(rng.uniform(-0.1, 0.1));
    }
  }
  table.row(data::Vocabulary::kPad).setZero();
  return table;
}

// ---------------------------------------------------------------- preprocess

config::Schema preprocess_schema() {
  config::Schema schema;
  schema.add_required_string("news", "news TSV: id, category, subcategory, title, body")
      .add_required_string("behaviors", "behaviors TSV: impressions with history and candidates")
      .add_required_string("out", "output directory for the processed artifacts")
      .add_string("embeddings", "", "pretrained word-vector file; empty draws random vectors")
      .add_string("dev_behaviors", "", "separate dev behaviors TSV; empty splits --behaviors")
      .add_real("dev_fraction", 0.1, "trailing fraction of --behaviors used as dev split")
      .add_int("embedding_dim", 300, "word vector width")
      .add_int("l_title", 16, "title token positions per news")
      .add_int("l_body", 30, "body token positions per news")
      .add_bool("use_body", false, "append body tokens to the feature rows")
      .add_int("min_count", 1, "minimum corpus frequency for a vocabulary word")
      .add_int("max_vocab", 40000, "vocabulary size cap, reserved rows included")
      .add_int("negatives", 4, "negatives sampled per positive")
      .add_int("history_max", 50, "most recent clicks kept per user")
      .add_int("seed", 1, "root seed for embedding draws and negative sampling")
      .add_string("log_file", "", "run log path; default <out>/preprocess.log");
  return schema;
}

void run_preprocess(const config::Config& cfg, Logger& logger) {
  const std::string out = cfg.get_string("out");
  std::filesystem::create_directories(out);
  open_log(logger, cfg, cat(out, "/preprocess.log"));
  log_settings(logger, "preprocess", cfg);

  const double dev_fraction = cfg.get_real("dev_fraction");
  if (dev_fraction < 0 || dev_fraction >= 1) {
    throw Error(cat("dev_fraction must be in [0, 1), got ", format_real(dev_fraction)));
  }
  const Index negatives = static_cast<Index>(cfg.get_int("negatives"));
  const Index history_max = static_cast<Index>(cfg.get_int("history_max"));
  const Index dim = static_cast<Index>(cfg.get_int("embedding_dim"));
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed"));

  const std::vector<data::NewsRecord> news = data::parse_news_file(cfg.get_string("news"));
  std::vector<data::ImpressionRecord> impressions =
      data::parse_behaviors_file(cfg.get_string("behaviors"));
  logger.info("preprocess", "parsed inputs",
              {field("news", news.size()), field("impressions", impressions.size())});

  std::vector<data::ImpressionRecord> dev;
  if (!cfg.get_string("dev_behaviors").empty()) {
    dev = data::parse_behaviors_file(cfg.get_string("dev_behaviors"));
  } else {
    const auto n_dev = static_cast<std::size_t>(
        std::llround(dev_fraction * static_cast<double>(impressions.size())));
    dev.assign(impressions.end() - static_cast<std::ptrdiff_t>(n_dev), impressions.end());
    impressions.resize(impressions.size() - n_dev);
  }

  const data::Vocabulary vocab =
      data::build_vocabulary(news, static_cast<int>(cfg.get_int("min_count")),
                             static_cast<Index>(cfg.get_int("max_vocab")));
  Rng root(seed);
  const data::EmbeddingMatrix table =
      cfg.get_string("embeddings").empty()
          ? random_embedding_table(vocab, dim, root.fork("embedding table"))
          : data::load_pretrained_embeddings(cfg.get_string("embeddings"), vocab, dim,
                                             root.fork("embedding table"));
  const data::FeatureMatrix features = data::build_feature_matrix(
      news, vocab, static_cast<Index>(cfg.get_int("l_title")),
      static_cast<Index>(cfg.get_int("l_body")), cfg.get_bool("use_body"));

  batching::SampleStats stats;
  Rng sampler = root.fork("negative sampling");
  const std::vector<batching::TrainingInstance> instances = batching::sample_training_instances(
      impressions, features, negatives, history_max, sampler, &logger, &stats);
  if (instances.empty()) throw Error("no training instances survived sampling");

  artifacts::write_vocabulary(cat(out, "/", artifacts::kVocabFile), vocab);
  artifacts::write_embeddings(cat(out, "/", artifacts::kEmbeddingsFile), table);
  artifacts::write_features(cat(out, "/", artifacts::kFeaturesFile),
                            cat(out, "/", artifacts::kFeatureIdsFile), features);
  artifacts::write_instances(cat(out, "/", artifacts::kInstancesFile), instances);
  data::write_behaviors_file(cat(out, "/", artifacts::kDevFile), dev);
  artifacts::write_meta(
      cat(out, "/", artifacts::kMetaFile),
      {{"vocab_size", cat(vocab.size())},
       {"embedding_dim", cat(dim)},
       {"feature_rows", cat(features.rows())},
       {"l_title", cat(cfg.get_int("l_title"))},
       {"l_body", cat(cfg.get_int("l_body"))},
       {"use_body", cfg.get_bool("use_body") ? "1" : "0"},
       {"negatives", cat(negatives)},
       {"history_max", cat(history_max)},
       {"seed", cat(seed)},
       {"train_impressions", cat(impressions.size())},
       {"dev_impressions", cat(dev.size())},
       {"train_instances", cat(instances.size())},
       {"skipped_no_positive", cat(stats.skipped_no_positive)},
       {"skipped_no_negative", cat(stats.skipped_no_negative)}});

  logger.info("preprocess", "wrote data directory",
              {field("out", out), field("vocab", vocab.size()),
               field("features", features.rows()), field("instances", instances.size()),
               field("dev_impressions", dev.size())});
  std::cout << "data_dir=" << out << " vocab=" << vocab.size()
            << " instances=" << instances.size() << " dev_impressions=" << dev.size() << "\n";
}

// --------------------------------------------------------------------- train

config::Schema train_schema() {
  config::Schema schema;
  schema.add_required_string("data", "processed data directory from `preprocess`")
      .add_string("checkpoints", "", "checkpoint directory; default <data>/checkpoints")
      .add_string("variant", "self_attn", "encoder variant: self_attn | topic_attn")
      .add_string("layout", "concat", "batch layout: zero_pad | concat")
      .add_int("epochs", 5, "maximum training epochs")
      .add_int("patience", 2, "epochs without dev-AUC improvement tolerated")
      .add_int("batch_size", 32, "instances per batch")
      .add_real("learning_rate", 1e-4, "Adam step size")
      .add_int("seed", 1, "seed for init and the per-epoch shuffles")
      .add_int("heads", 16, "self-attention heads")
      .add_int("head_dim", 16, "width per head")
      .add_int("attention_dim", 200, "additive-attention hidden width")
      .add_int("topics", 50, "topic count (topic_attn)")
      .add_real("temperature", 1.0, "topic softmax temperature")
      .add_int("embedding_dim", 300, "word vector width; default follows the data directory")
      .add_bool("train_embedding", true, "update the embedding table during training")
      .add_int("history_max", 50, "history cap; default follows the data directory")
      .add_int("negatives", 4, "negatives per instance; must match the data directory")
      .add_bool("float64", false, "train in double precision")
      .add_string("grid", "",
                  "grid axes, e.g. learning_rate=1e-4,1e-3;batch_size=16,32; empty trains once")
      .add_string("objective", "auc", "grid objective: auc | mrr | ndcg5 | ndcg10")
      .add_string("log_file", "", "run log path; default <checkpoints>/train.log");
  return schema;
}

template <class Real>
void run_train(const config::Config& cfg, Logger& logger) {
  const std::string data_dir = cfg.get_string("data");
  std::string checkpoints = cfg.get_string("checkpoints");
  if (checkpoints.empty()) checkpoints = cat(data_dir, "/checkpoints");
  std::filesystem::create_directories(checkpoints);
  open_log(logger, cfg, cat(checkpoints, "/train.log"));
  log_settings(logger, "train", cfg);

  const artifacts::DataDir bundle = artifacts::load_data_dir(data_dir);

  model::ModelConfig model_config;
  model_config.vocab_size = bundle.vocab.size();
  model_config.embedding_dim = cfg.is_default("embedding_dim")
                                   ? static_cast<Index>(bundle.embeddings.cols())
                                   : static_cast<Index>(cfg.get_int("embedding_dim"));
  if (model_config.embedding_dim != bundle.embeddings.cols()) {
    throw Error(cat("embedding_dim ", model_config.embedding_dim,
                    " does not match the processed table (", bundle.embeddings.cols(),
                    "); drop the flag or rerun preprocess"));
  }
  model_config.heads = static_cast<Index>(cfg.get_int("heads"));
  model_config.head_dim = static_cast<Index>(cfg.get_int("head_dim"));
  model_config.attention_dim = static_cast<Index>(cfg.get_int("attention_dim"));
  model_config.topics = static_cast<Index>(cfg.get_int("topics"));
  model_config.temperature = cfg.get_real("temperature");
  model_config.variant = model::parse_variant(cfg.get_string("variant"));
  model_config.train_embedding = cfg.get_bool("train_embedding");
  model_config.validate();

  train::TrainConfig train_config;
  train_config.epochs = static_cast<int>(cfg.get_int("epochs"));
  train_config.patience = static_cast<int>(cfg.get_int("patience"));
  train_config.learning_rate = cfg.get_real("learning_rate");
  train_config.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  train_config.layout = batching::parse_layout(cfg.get_string("layout"));
  train_config.checkpoint_dir = checkpoints;
  train_config.plan.batch_size = static_cast<Index>(cfg.get_int("batch_size"));
  train_config.plan.history_max = resolve_from_meta(cfg, "history_max", bundle.meta);
  train_config.plan.negatives = resolve_from_meta(cfg, "negatives", bundle.meta);
  const auto meta_negatives = static_cast<Index>(meta_int(bundle.meta, "negatives"));
  if (train_config.plan.negatives != meta_negatives) {
    throw Error(cat("negatives ", train_config.plan.negatives,
                    " does not match the processed instances (", meta_negatives,
                    "); drop the flag or rerun preprocess"));
  }

  if (!cfg.get_string("grid").empty()) {
    train::GridSpec grid;
    grid.objective = cfg.get_string("objective");
    for (const std::string& axis : split(cfg.get_string("grid"), ';')) {
      const auto eq = axis.find('=');
      if (eq == std::string::npos) {
        throw Error(cat("grid axis '", axis, "' is not of the form name=v1,v2,..."));
      }
      std::vector<double> values;
      for (const std::string& token : split(axis.substr(eq + 1), ',')) {
        double value = 0;
        if (!parse_double(trim(token), &value)) {
          throw Error(cat("grid value '", trim(token), "' is not a number"));
        }
        values.push_back(value);
      }
      grid.axes.emplace_back(trim(axis.substr(0, eq)), std::move(values));
    }
    const train::GridResult result = train::grid_search<Real>(
        grid, train_config, model_config, &bundle.embeddings, bundle.instances, bundle.dev,
        bundle.features, &logger);
    std::cout << train::render_grid_table(result);
    if (result.winner < 0) throw Error("every grid cell failed");
    const train::GridCell& winner = result.cells[static_cast<std::size_t>(result.winner)];
    logger.info("train", "grid winner",
                {field("cell", result.winner),
                 field("assignment", train::detail::render_assignment(winner.assignment)),
                 field(result.objective, winner.objective),
                 field("checkpoint", winner.checkpoint)});
    std::cout << "winner=" << result.winner << " checkpoint=" << winner.checkpoint << "\n";
    return;
  }

  model::Params<Real> params = model::Params<Real>::random_init(
      model_config, Rng(mix_seed(train_config.seed, hash64("params init"))));
  params.set_embeddings(bundle.embeddings);

  const train::TrainResult result =
      train::train(params, train_config, bundle.instances, bundle.dev, bundle.features, &logger);
  for (const train::EpochRecord& epoch : result.epochs) {
    std::cout << "epoch=" << epoch.epoch << " loss=" << format_fixed(epoch.loss, 6) << " "
              << eval::render_metrics(epoch.dev) << (epoch.improved ? " improved=1" : " improved=0")
              << "\n";
  }
  std::cout << "best_epoch=" << result.best_epoch << " best_auc="
            << format_fixed(result.best_auc, 6) << " stopped_early="
            << (result.stopped_early ? 1 : 0) << " checkpoint=" << result.best_checkpoint << "\n";
  logger.info("train", "finished",
              {field("best_epoch", result.best_epoch), field("best_auc", result.best_auc),
               field("checkpoint", result.best_checkpoint),
               field("stopped_early", result.stopped_early ? 1 : 0)});
}

// ------------------------------------------------------------------ evaluate

config::Schema evaluate_schema() {
  config::Schema schema;
  schema.add_required_string("data", "processed data directory from `preprocess`")
      .add_required_string("checkpoint", "checkpoint file from `train`")
      .add_string("layout", "concat", "batch layout: zero_pad | concat")
      .add_int("history_max", 50, "history cap; default follows the data directory")
      .add_int("block", 256, "impressions scored per user-encoder call")
      .add_bool("float64", false, "evaluate in double precision")
      .add_string("log_file", "", "run log path; default <data>/evaluate.log");
  return schema;
}

template <class Real>
void run_evaluate(const config::Config& cfg, Logger& logger) {
  const std::string data_dir = cfg.get_string("data");
  open_log(logger, cfg, cat(data_dir, "/evaluate.log"));
  log_settings(logger, "evaluate", cfg);

  const artifacts::DataDir bundle = artifacts::load_data_dir(data_dir);
  const train::Checkpoint<Real> ckpt = train::load_checkpoint<Real>(cfg.get_string("checkpoint"));

  eval::EvalOptions options;
  options.layout = batching::parse_layout(cfg.get_string("layout"));
  options.history_max = resolve_from_meta(cfg, "history_max", bundle.meta);
  options.block = static_cast<Index>(cfg.get_int("block"));

  eval::EvalStats stats;
  const eval::MetricsReport report =
      eval::evaluate_model(ckpt.params, bundle.dev, bundle.features, options, &stats);
  if (report.evaluated == 0) {
    throw Error("no dev impression had both a positive and a negative candidate");
  }
  std::cout << eval::render_metrics(report) << "\n";
  logger.info("evaluate", "metrics",
              {field("auc", report.auc), field("mrr", report.mrr), field("ndcg5", report.ndcg5),
               field("ndcg10", report.ndcg10), field("evaluated", report.evaluated),
               field("skipped", report.skipped), field("encoded_rows", stats.encoded_rows),
               field("layout", cfg.get_string("layout"))});
}

// --------------------------------------------------------------------- bench

config::Schema bench_schema() {
  config::Schema schema;
  schema.add_required_string("data", "processed data directory from `preprocess`")
      .add_required_string("checkpoint", "checkpoint file from `train`")
      .add_string("layouts", "zero_pad,concat", "comma-separated layouts to measure")
      .add_int("batch_size", 32, "instances per batch")
      .add_int("history_max", 50, "history cap; default follows the data directory")
      .add_int("warmup", 10, "untimed batches per phase")
      .add_int("measured", 50, "timed batches per phase")
      .add_int("seed", 1, "plan seed; identical across layouts")
      .add_bool("float64", false, "measure in double precision")
      .add_string("log_file", "", "run log path; default <data>/bench.log");
  return schema;
}

template <class Real>
void run_bench(const config::Config& cfg, Logger& logger) {
  const std::string data_dir = cfg.get_string("data");
  open_log(logger, cfg, cat(data_dir, "/bench.log"));
  log_settings(logger, "bench", cfg);

  const artifacts::DataDir bundle = artifacts::load_data_dir(data_dir);
  const train::Checkpoint<Real> ckpt = train::load_checkpoint<Real>(cfg.get_string("checkpoint"));

  eval::ThroughputOptions options;
  options.plan.batch_size = static_cast<Index>(cfg.get_int("batch_size"));
  options.plan.history_max = resolve_from_meta(cfg, "history_max", bundle.meta);
  options.plan.negatives = static_cast<Index>(meta_int(bundle.meta, "negatives"));
  options.plan.seed = mix_seed(static_cast<std::uint64_t>(cfg.get_int("seed")),
                               hash64("bench plan"));
  options.warmup_batches = static_cast<int>(cfg.get_int("warmup"));
  options.measured_batches = static_cast<int>(cfg.get_int("measured"));

  std::map<std::string, eval::ThroughputReport> reports;
  for (const std::string& token : split(cfg.get_string("layouts"), ',')) {
    const std::string name = trim(token);
    options.layout = batching::parse_layout(name);
    const eval::ThroughputReport report =
        eval::measure_throughput(ckpt.params, bundle.instances, bundle.features, options);
    std::cout << eval::render_throughput(report) << "\n";
    logger.info("bench", "layout measured", {field("line", eval::throughput_machine_line(report))});
    reports.emplace(name, report);
  }

  const auto zero_pad = reports.find("zero_pad");
  const auto concat = reports.find("concat");
  if (zero_pad != reports.end() && concat != reports.end()) {
    const double train_gain = eval::improvement_percent(concat->second.train.per_second,
                                                        zero_pad->second.train.per_second);
    const double eval_gain = eval::improvement_percent(concat->second.eval.per_second,
                                                       zero_pad->second.eval.per_second);
    std::cout << "train_improvement_percent=" << format_fixed(train_gain, 2) << "\n"
              << "eval_improvement_percent=" << format_fixed(eval_gain, 2) << "\n";
    logger.info("bench", "concat vs zero_pad",
                {field("train_improvement_percent", train_gain),
                 field("eval_improvement_percent", eval_gain)});
  }
}

// ------------------------------------------------------------------- explain

config::Schema explain_schema() {
  config::Schema schema;
  schema.add_required_string("data", "processed data directory from `preprocess`")
      .add_required_string("checkpoint", "topic-variant checkpoint file from `train`")
      .add_required_string("user", "user id to explain for")
      .add_required_string("news", "recommended news id to explain")
      .add_string("history", "", "comma-separated news ids; empty looks the user up in dev")
      .add_int("top_t", 3, "topics reported")
      .add_int("top_m", 5, "terms per topic per side")
      .add_string("open", "[[", "opening term delimiter")
      .add_string("close", "]]", "closing term delimiter")
      .add_int("history_max", 50, "history cap; default follows the data directory")
      .add_string("out", "", "write the explanation here instead of stdout")
      .add_bool("float64", false, "run in double precision")
      .add_string("log_file", "", "run log path; default <data>/explain.log");
  return schema;
}

template <class Real>
void run_explain(const config::Config& cfg, Logger& logger) {
  const std::string data_dir = cfg.get_string("data");
  open_log(logger, cfg, cat(data_dir, "/explain.log"));
  log_settings(logger, "explain", cfg);

  const artifacts::DataDir bundle = artifacts::load_data_dir(data_dir);
  const train::Checkpoint<Real> ckpt = train::load_checkpoint<Real>(cfg.get_string("checkpoint"));
  const std::string user = cfg.get_string("user");

  std::vector<std::string> history;
  if (!cfg.get_string("history").empty()) {
    for (const std::string& token : split(cfg.get_string("history"), ',')) {
      history.push_back(trim(token));
    }
  } else {
    bool found = false;
    for (const data::ImpressionRecord& impression : bundle.dev) {
      if (impression.user_id == user) {
        history = impression.history;  // latest impression wins
        found = true;
      }
    }
    if (!found) {
      throw Error(cat("user '", user,
                      "' is not in the dev impressions; pass --history id1,id2,..."));
    }
  }

  eval::ExplanationOptions options;
  options.top_t = static_cast<int>(cfg.get_int("top_t"));
  options.top_m = static_cast<int>(cfg.get_int("top_m"));
  options.open = cfg.get_string("open");
  options.close = cfg.get_string("close");
  options.history_max = resolve_from_meta(cfg, "history_max", bundle.meta);

  const eval::TopicExplanation explanation = eval::generate_explanation(
      user, history, cfg.get_string("news"), ckpt.params, bundle.features, bundle.vocab, options);

  if (cfg.get_string("out").empty()) {
    std::cout << explanation.rendered;
  } else {
    std::ofstream out(cfg.get_string("out"), std::ios::binary);
    if (!out) throw Error(cat("cannot open file: ", cfg.get_string("out")));
    out << explanation.rendered;
  }
  logger.info("explain", "rendered",
              {field("user", user), field("news", explanation.news_id),
               field("topics", explanation.topics.size()),
               field("top_shared",
                     explanation.topics.empty() ? 0.0 : explanation.topics.front().shared)});
}

}  // namespace

int cmd_preprocess(std::span<const std::string> args) {
  return run_command("preprocess", args, preprocess_schema(), run_preprocess);
}

int cmd_train(std::span<const std::string> args) {
  return run_command("train", args, train_schema(), [](const config::Config& cfg, Logger& logger) {
    if (cfg.get_bool("float64")) return run_train<double>(cfg, logger);
    run_train<float>(cfg, logger);
  });
}

int cmd_evaluate(std::span<const std::string> args) {
  return run_command("evaluate", args, evaluate_schema(),
                     [](const config::Config& cfg, Logger& logger) {
                       if (cfg.get_bool("float64")) return run_evaluate<double>(cfg, logger);
                       run_evaluate<float>(cfg, logger);
                     });
}

int cmd_bench(std::span<const std::string> args) {
  return run_command("bench", args, bench_schema(), [](const config::Config& cfg, Logger& logger) {
    if (cfg.get_bool("float64")) return run_bench<double>(cfg, logger);
    run_bench<float>(cfg, logger);
  });
}

int cmd_explain(std::span<const std::string> args) {
  return run_command("explain", args, explain_schema(),
                     [](const config::Config& cfg, Logger& logger) {
                       if (cfg.get_bool("float64")) return run_explain<double>(cfg, logger);
                       run_explain<float>(cfg, logger);
                     });
}

int run_main(int argc, char** argv) {
  const auto usage = [](std::ostream& os) {
    os << "usage: newsrec <subcommand> [--key value]... [--config file]\n"
          "\n"
          "subcommands:\n"
          "  preprocess  raw news/behaviors/embeddings -> processed data directory\n"
          "  train       processed data -> checkpoints (add --grid for a grid search)\n"
          "  evaluate    checkpoint + dev impressions -> ranking metrics\n"
          "  bench       checkpoint + instances -> per-layout throughput\n"
          "  explain     checkpoint + (user, news) -> topic explanation text\n"
          "\n"
          "`newsrec <subcommand> --help` lists every setting.\n";
  };

  if (argc < 2) {
    usage(std::cerr);
    return 2;
  }
  const std::string name = argv[1];
  if (name == "--help" || name == "-h" || name == "help") {
    usage(std::cout);
    return 0;
  }
  std::vector<std::string> args(argv + 2, argv + argc);
  if (name == "preprocess") return cmd_preprocess(args);
  if (name == "train") return cmd_train(args);
  if (name == "evaluate") return cmd_evaluate(args);
  if (name == "bench") return cmd_bench(args);
  if (name == "explain") return cmd_explain(args);
  std::cerr << "unknown subcommand '" << name << "'\n";
  usage(std::cerr);
  return 2;
}

}  // namespace newsrec::cli
