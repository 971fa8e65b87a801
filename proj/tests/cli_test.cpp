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

#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "newsrec/commands.hpp"
#include "newsrec/config.hpp"
#include "newsrec/io.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/synth.hpp"
#include "newsrec/types.hpp"

using namespace newsrec;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* tag) {
    path = std::filesystem::temp_directory_path() /
           cat("newsrec_cli_", tag, "_", static_cast<unsigned long>(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

config::Schema demo_schema() {
  config::Schema schema;
  schema.add_required_string("news", "input news file")
      .add_int("epochs", 5, "training epochs")
      .add_real("learning_rate", 1e-4, "adam step size")
      .add_bool("shuffle", true, "shuffle instances")
      .add_string("checkpoint", "", "checkpoint path");
  return schema;
}

std::vector<std::string> args(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("settings resolve flag over file over default") {
  TempDir dir("config");
  const std::string file = dir.str() + "/run.conf";
  io::write_text_file(file, "epochs=9\nlearning_rate=0.5\nnews=from_file.tsv\n");

  const config::Schema schema = demo_schema();
  const auto parsed = config::parse_config(
      schema, args({"--config", file.c_str(), "--learning_rate", "0.25"}));

  CHECK(parsed.get_int("epochs") == 9);
  CHECK(parsed.provenance("epochs") == config::Provenance::kFile);
  CHECK(parsed.get_real("learning_rate") == 0.25);
  CHECK(parsed.provenance("learning_rate") == config::Provenance::kFlag);
  CHECK(parsed.get_bool("shuffle"));
  CHECK(parsed.is_default("shuffle"));
  CHECK(parsed.get_string("news") == "from_file.tsv");

  const std::string rendered = parsed.render();
  CHECK(rendered.find("epochs=9 (file)") != std::string::npos);
  CHECK(rendered.find("learning_rate=0.25 (flag)") != std::string::npos);
  CHECK(rendered.find("shuffle=true (default)") != std::string::npos);
}

TEST_CASE("lower provenance never overwrites higher") {
  const config::Schema schema = demo_schema();
  config::Config cfg(&schema);
  cfg.set("epochs", "3", config::Provenance::kFlag);
  cfg.set("epochs", "8", config::Provenance::kFile);
  CHECK(cfg.get_int("epochs") == 3);
  // Equal provenance lands: later flags win.
  cfg.set("epochs", "4", config::Provenance::kFlag);
  CHECK(cfg.get_int("epochs") == 4);
}

TEST_CASE("schema rejects unknown keys with a suggestion") {
  const config::Schema schema = demo_schema();
  config::Config cfg(&schema);
  CHECK_THROWS_WITH_AS(cfg.set("chekpoint", "x", config::Provenance::kFlag),
                       doctest::Contains("did you mean 'checkpoint'"), Error);
  CHECK_THROWS_WITH_AS(config::apply_flags(cfg, args({"--epocs", "3"})),
                       doctest::Contains("epochs"), Error);
}

TEST_CASE("values are validated against their declared type") {
  const config::Schema schema = demo_schema();
  config::Config cfg(&schema);
  CHECK_THROWS_WITH_AS(cfg.set("epochs", "three", config::Provenance::kFlag),
                       doctest::Contains("epochs"), Error);
  CHECK_THROWS_WITH_AS(cfg.set("learning_rate", "fast", config::Provenance::kFlag),
                       doctest::Contains("learning_rate"), Error);
  CHECK_THROWS_WITH_AS(cfg.set("shuffle", "maybe", config::Provenance::kFlag),
                       doctest::Contains("shuffle"), Error);
  cfg.set("shuffle", "false", config::Provenance::kFlag);
  CHECK(!cfg.get_bool("shuffle"));
}

TEST_CASE("flag forms: --key value, --key=value, bare bool") {
  const config::Schema schema = demo_schema();
  config::Config cfg(&schema);
  config::apply_flags(cfg, args({"--epochs=7", "--shuffle", "--news", "a.tsv"}));
  CHECK(cfg.get_int("epochs") == 7);
  CHECK(cfg.get_bool("shuffle"));
  CHECK(cfg.get_string("news") == "a.tsv");
  CHECK_THROWS_WITH_AS(config::apply_flags(cfg, args({"--epochs"})),
                       doctest::Contains("value"), Error);
  CHECK_THROWS_WITH_AS(config::apply_flags(cfg, args({"epochs", "3"})),
                       doctest::Contains("--"), Error);
}

TEST_CASE("config files: comments, blanks, and malformed lines") {
  TempDir dir("file");
  const config::Schema schema = demo_schema();
  const std::string good = dir.str() + "/good.conf";
  io::write_text_file(good, "# comment\n\nepochs=2\n  shuffle = false \n");
  config::Config cfg(&schema);
  config::apply_file(cfg, good);
  CHECK(cfg.get_int("epochs") == 2);
  CHECK(!cfg.get_bool("shuffle"));

  const std::string bad = dir.str() + "/bad.conf";
  io::write_text_file(bad, "epochs=2\njust-some-words\n");
  config::Config fresh(&schema);
  CHECK_THROWS_WITH_AS(config::apply_file(fresh, bad), doctest::Contains("bad.conf:2"), Error);
  CHECK_THROWS_AS(config::apply_file(fresh, dir.str() + "/absent.conf"), Error);
}

TEST_CASE("required settings are enforced after parsing") {
  const config::Schema schema = demo_schema();
  const auto cfg = config::parse_config(schema, args({"--epochs", "3"}));
  CHECK_THROWS_WITH_AS(cfg.check_required(), doctest::Contains("news"), Error);
  const auto ok = config::parse_config(schema, args({"--news", "n.tsv"}));
  CHECK_NOTHROW(ok.check_required());
}

TEST_CASE("subcommands exit nonzero on bad invocations") {
  CHECK(cli::cmd_preprocess(args({"--help"})) == 0);
  CHECK(cli::cmd_train(args({"--help"})) == 0);
  // Missing required settings.
  CHECK(cli::cmd_preprocess(args({})) == 1);
  CHECK(cli::cmd_evaluate(args({"--data", "/nonexistent"})) == 1);
  // Unknown flag.
  CHECK(cli::cmd_train(args({"--data", "/nonexistent", "--epocs", "1"})) == 1);
  // Missing input files.
  CHECK(cli::cmd_preprocess(args({"--news", "/nonexistent/news.tsv", "--behaviors",
                                  "/nonexistent/behaviors.tsv", "--out", "/tmp/unused_out"})) ==
        1);
}

TEST_CASE("pipeline subcommands run end to end and preprocess is reproducible") {
  TempDir dir("pipeline");
  const std::string fixture = dir.str() + "/fixture";
  synth::FixtureConfig fixture_config;
  fixture_config.news = 64;
  fixture_config.impressions = 120;
  fixture_config.embedding_dim = 16;
  synth::write_fixture(fixture, fixture_config);

  const std::string data1 = dir.str() + "/data1";
  const std::string data2 = dir.str() + "/data2";
  const auto preprocess_args = [&](const std::string& out) {
    return args({"--news", (fixture + "/news.tsv").c_str(), "--behaviors",
                 (fixture + "/behaviors.tsv").c_str(), "--embeddings",
                 (fixture + "/embeddings.txt").c_str(), "--out", out.c_str(), "--embedding_dim",
                 "16", "--l_title", "8", "--negatives", "2", "--history_max", "10", "--seed",
                 "3"});
  };
  REQUIRE(cli::cmd_preprocess(preprocess_args(data1)) == 0);
  REQUIRE(cli::cmd_preprocess(preprocess_args(data2)) == 0);

  for (const char* name :
       {"vocab.txt", "embeddings.bin", "features.bin", "feature_ids.txt",
        "train_instances.tsv", "dev_impressions.tsv", "meta.txt"}) {
    CAPTURE(name);
    REQUIRE(std::filesystem::exists(data1 + "/" + name));
    CHECK(io::read_text_file(data1 + "/" + name) == io::read_text_file(data2 + "/" + name));
  }

  const std::string checkpoints = dir.str() + "/ckpt";
  REQUIRE(cli::cmd_train(args({"--data", data1.c_str(), "--checkpoints", checkpoints.c_str(),
                               "--variant", "topic_attn", "--epochs", "1", "--batch_size",
                               "16", "--heads", "2", "--head_dim", "8", "--attention_dim", "16",
                               "--topics", "4", "--history_max", "10", "--seed", "5"})) == 0);
  const std::string best = checkpoints + "/best.ckpt";
  REQUIRE(std::filesystem::exists(best));

  CHECK(cli::cmd_evaluate(args({"--data", data1.c_str(), "--checkpoint", best.c_str()})) == 0);
  CHECK(cli::cmd_evaluate(args({"--data", data1.c_str(), "--checkpoint", best.c_str(),
                                "--layout", "zero_pad"})) == 0);

  CHECK(cli::cmd_bench(args({"--data", data1.c_str(), "--checkpoint", best.c_str(), "--warmup",
                             "1", "--measured", "2", "--batch_size", "8"})) == 0);

  const std::string explanation_path = dir.str() + "/explanation.txt";
  CHECK(cli::cmd_explain(args({"--data", data1.c_str(), "--checkpoint", best.c_str(), "--user",
                               "U0", "--history", "N0x0,N0x1", "--news", "N0x2", "--out",
                               explanation_path.c_str()})) == 0);
  const std::string rendered = io::read_text_file(explanation_path);
  CHECK(rendered.find("user U0 -> news N0x2") != std::string::npos);
  CHECK(rendered.find("[[") != std::string::npos);

  // Explaining with a self-attention model is refused.
  const std::string sa_ckpt = dir.str() + "/sa";
  REQUIRE(cli::cmd_train(args({"--data", data1.c_str(), "--checkpoints", sa_ckpt.c_str(),
                               "--variant", "self_attn", "--epochs", "1", "--batch_size",
                               "16", "--heads", "2", "--head_dim", "8", "--attention_dim", "16",
                               "--history_max", "10"})) == 0);
  CHECK(cli::cmd_explain(args({"--data", data1.c_str(), "--checkpoint",
                               (sa_ckpt + "/best.ckpt").c_str(), "--user", "U0", "--history",
                               "N0x0", "--news", "N0x2"})) == 1);
}

TEST_CASE("run_main dispatches and reports unknown subcommands") {
  std::vector<std::string> storage{"newsrec", "definitely_not_a_command"};
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  CHECK(cli::run_main(static_cast<int>(argv.size()), argv.data()) == 2);

  std::vector<std::string> help{"newsrec", "--help"};
  argv.clear();
  for (auto& s : help) argv.push_back(s.data());
  CHECK(cli::run_main(static_cast<int>(argv.size()), argv.data()) == 0);
}

}  // TEST_SUITE
