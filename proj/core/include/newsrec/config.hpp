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

#ifndef NEWSREC_CONFIG_HPP_
#define NEWSREC_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "newsrec/types.hpp"

// Schema-validated settings with three-tier precedence: command-line flag
// over config-file entry over built-in default. Every key records where its
// value came from, and unknown keys are rejected with a nearest-known-key
// suggestion.

namespace newsrec::config {

enum class Provenance { kDefault, kFile, kFlag };
const char* provenance_name(Provenance provenance);

enum class Kind { kInt, kReal, kBool, kString };

struct Setting {
  std::string key;
  Kind kind = Kind::kString;
  std::string default_value;
  std::string help;
  bool required = false;  // must be set by file or flag
};

class Schema {
 public:
  Schema& add_int(const std::string& key, long long default_value, const std::string& help);
  Schema& add_real(const std::string& key, double default_value, const std::string& help);
  Schema& add_bool(const std::string& key, bool default_value, const std::string& help);
  Schema& add_string(const std::string& key, const std::string& default_value,
                     const std::string& help);
  Schema& add_required_string(const std::string& key, const std::string& help);

  const std::vector<Setting>& settings() const { return settings_; }
  const Setting* find(const std::string& key) const;
  // Nearest known key by edit distance; empty when the schema is empty.
  std::string nearest(const std::string& key) const;
  // One line per setting: key, type, default, help.
  std::string describe() const;

 private:
  Schema& add(Setting setting);
  std::vector<Setting> settings_;
};

class Config {
 public:
  explicit Config(const Schema* schema);

  // Validates the key against the schema and the value against its type.
  // A value only lands if its provenance outranks or equals the current one.
  void set(const std::string& key, const std::string& value, Provenance provenance);

  long long get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;

  Provenance provenance(const std::string& key) const;
  bool is_default(const std::string& key) const {
    return provenance(key) == Provenance::kDefault;
  }

  // Throws when a required setting was never provided.
  void check_required() const;

  // Resolved settings, one "key=value (provenance)" line each, key order.
  std::string render() const;

  const Schema& schema() const { return *schema_; }

 private:
  struct Entry {
    std::string value;
    Provenance provenance = Provenance::kDefault;
  };
  const Setting& setting(const std::string& key) const;

  const Schema* schema_;
  std::map<std::string, Entry> values_;
};

// key=value lines; blank lines and '#' comments allowed. Applies with file
// provenance. Errors name the 1-based line.
void apply_file(Config& config, const std::string& path);

// --key value and --key=value forms; bool settings also allow bare --key.
// Applies with flag provenance. Later flags override earlier ones.
void apply_flags(Config& config, std::span<const std::string> args);

// Defaults, then the file named by a --config flag (when present), then the
// remaining flags.
Config parse_config(const Schema& schema, std::span<const std::string> args);

}  // namespace newsrec::config

#endif  // NEWSREC_CONFIG_HPP_
