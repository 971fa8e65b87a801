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

#include <cstdint>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "newsrec/io.hpp"
#include "newsrec/log.hpp"
#include "newsrec/rng.hpp"
#include "newsrec/strings.hpp"
#include "newsrec/types.hpp"

using namespace newsrec;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "newsrec_utils_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("utils") {

TEST_CASE("rng replays for a fixed seed and diverges across forks") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.below(1000) == b.below(1000));

  Rng base(7);
  Rng f1 = base.fork("negative sampling");
  Rng f2 = base.fork("embedding table");
  bool any_diff = false;
  for (int i = 0; i < 32; ++i) any_diff |= f1.below(1 << 30) != f2.below(1 << 30);
  CHECK(any_diff);

  // Forking is a function of the seed, not of how far the stream advanced.
  Rng c(7);
  c.below(10);
  c.below(10);
  Rng f3 = c.fork("negative sampling");
  Rng f1b = Rng(7).fork("negative sampling");
  for (int i = 0; i < 16; ++i) CHECK(f3.below(1000) == f1b.below(1000));
}

TEST_CASE("rng below is in range and roughly uniform") {
  Rng rng(3);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t draw = rng.below(10);
    REQUIRE(draw < 10);
    ++counts[static_cast<std::size_t>(draw)];
  }
  for (int count : counts) {
    CHECK(count > 800);
    CHECK(count < 1200);
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("rng shuffle is a seeded permutation") {
  std::vector<int> items{0, 1, 2, 3, 4, 5, 6, 7};
  Rng rng(9);
  rng.shuffle(items);
  std::vector<int> again{0, 1, 2, 3, 4, 5, 6, 7};
  Rng rng2(9);
  rng2.shuffle(again);
  CHECK(items == again);
  CHECK(std::set<int>(items.begin(), items.end()).size() == 8);
}

TEST_CASE("string helpers") {
  CHECK(cat("a", 1, "-", 2.5) == "a1-2.5");
  CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split_ws("  one\ttwo   three ") == std::vector<std::string>{"one", "two", "three"});
  CHECK(trim("  x  ") == "x");
  CHECK(trim("\t\r\n") == "");
  CHECK(join(std::vector<std::string>{"a", "b"}, " ") == "a b");
  CHECK(edit_distance("batch_size", "batchsize") == 1);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(format_fixed(1.23456789, 4) == "1.2346");

  double real = 0;
  CHECK(parse_double("1e-4", &real));
  CHECK(real == doctest::Approx(1e-4));
  CHECK_FALSE(parse_double("1e-4x", &real));
  long long integer = 0;
  CHECK(parse_i64("-12", &integer));
  CHECK(integer == -12);
  CHECK_FALSE(parse_i64("12.5", &integer));
}

TEST_CASE("format_real round-trips doubles") {
  for (double value : {0.1, 1e-4, 3.0, -2.75, 1.0 / 3.0}) {
    double parsed = 0;
    REQUIRE(parse_double(format_real(value), &parsed));
    CHECK(parsed == value);
  }
}

TEST_CASE("binary io round-trips and truncation is detected") {
  const std::string path = temp_path("io.bin");
  {
    auto out = io::open_output(path);
    io::write_u32(out, 7);
    io::write_u64(out, 1234567890123ull);
    io::write_string(out, "hello world");
  }
  {
    auto in = io::open_input(path);
    CHECK(io::read_u32(in, "t") == 7);
    CHECK(io::read_u64(in, "t") == 1234567890123ull);
    CHECK(io::read_string(in, "t") == "hello world");
    CHECK_THROWS_WITH_AS(io::read_u32(in, "tail"), doctest::Contains("corrupt or truncated"),
                         Error);
  }
  CHECK_THROWS_WITH_AS(io::open_input(temp_path("absent.bin")),
                       doctest::Contains("cannot open file"), Error);
}

TEST_CASE("log records carry fields and quote awkward values") {
  const std::string path = temp_path("run.log");
  {
    Logger logger(/*mirror_to_stderr=*/false);
    logger.open_run_file(path);
    logger.info("test", "plain", {field("k", 1)});
    logger.warning("test", "spaced", {field("value", std::string("a b"))});
    logger.error("test", "boom");
    CHECK(logger.error_count() == 1);
    CHECK(logger.warning_count() == 1);
  }
  const std::string text = io::read_text_file(path);
  CHECK(text.find("INFO test plain k=1") != std::string::npos);
  CHECK(text.find("value=\"a b\"") != std::string::npos);
  CHECK(text.find("ERROR test boom") != std::string::npos);

  // Timestamps never go backwards within a run.
  std::vector<std::string> stamps;
  for (const std::string& line : split(text, '\n')) {
    if (!line.empty()) stamps.push_back(split(line, ' ').front());
  }
  REQUIRE(stamps.size() == 3);
  CHECK(stamps[0] <= stamps[1]);
  CHECK(stamps[1] <= stamps[2]);
}

}  // TEST_SUITE
