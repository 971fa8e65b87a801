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

#include "newsrec/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "newsrec/io.hpp"
#include "newsrec/strings.hpp"

namespace newsrec::config {

namespace {

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::kInt: return "integer";
    case Kind::kReal: return "real";
    case Kind::kBool: return "boolean";
    case Kind::kString: return "string";
  }
  return "?";
}

void check_value(const Setting& setting, const std::string& value) {
  switch (setting.kind) {
    case Kind::kInt: {
      long long parsed = 0;
      if (!parse_i64(value, &parsed)) {
        throw Error(cat("value for ", setting.key, " must be an integer, got '", value, "'"));
      }
      return;
    }
    case Kind::kReal: {
      double parsed = 0;
      if (!parse_double(value, &parsed)) {
        throw Error(cat("value for ", setting.key, " must be a number, got '", value, "'"));
      }
      return;
    }
    case Kind::kBool:
      if (value != "true" && value != "false" && value != "1" && value != "0") {
        throw Error(cat("value for ", setting.key, " must be true/false/1/0, got '", value, "'"));
      }
      return;
    case Kind::kString:
      return;
  }
}

}  // namespace

const char* provenance_name(Provenance provenance) {
  switch (provenance) {
    case Provenance::kDefault: return "default";
    case Provenance::kFile: return "file";
    case Provenance::kFlag: return "flag";
  }
  return "?";
}

Schema& Schema::add(Setting setting) {
  if (find(setting.key) != nullptr) throw Error(cat("duplicate setting '", setting.key, "'"));
  settings_.push_back(std::move(setting));
  return *this;
}

Schema& Schema::add_int(const std::string& key, long long default_value, const std::string& help) {
  return add({key, Kind::kInt, cat(default_value), help, false});
}

Schema& Schema::add_real(const std::string& key, double default_value, const std::string& help) {
  return add({key, Kind::kReal, format_real(default_value), help, false});
}

Schema& Schema::add_bool(const std::string& key, bool default_value, const std::string& help) {
  return add({key, Kind::kBool, default_value ? "true" : "false", help, false});
}

Schema& Schema::add_string(const std::string& key, const std::string& default_value,
                           const std::string& help) {
  return add({key, Kind::kString, default_value, help, false});
}

Schema& Schema::add_required_string(const std::string& key, const std::string& help) {
  return add({key, Kind::kString, "", help, true});
}

const Setting* Schema::find(const std::string& key) const {
  for (const Setting& setting : settings_) {
    if (setting.key == key) return &setting;
  }
  return nullptr;
}

std::string Schema::nearest(const std::string& key) const {
  std::string best_key;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const Setting& setting : settings_) {
    const std::size_t d = edit_distance(key, setting.key);
    if (d < best) {
      best = d;
      best_key = setting.key;
    }
  }
  return best_key;
}

std::string Schema::describe() const {
  std::string out;
  for (const Setting& setting : settings_) {
    out += cat("  --", setting.key, " <", kind_name(setting.kind), ">");
    if (setting.required) {
      out += " (required)";
    } else if (!setting.default_value.empty()) {
      out += cat(" (default ", setting.default_value, ")");
    }
    out += cat("  ", setting.help, "\n");
  }
  return out;
}

Config::Config(const Schema* schema) : schema_(schema) {
  for (const Setting& setting : schema->settings()) {
    values_[setting.key] = Entry{setting.default_value, Provenance::kDefault};
  }
}

const Setting& Config::setting(const std::string& key) const {
  const Setting* found = schema_->find(key);
  if (found == nullptr) {
    const std::string suggestion = schema_->nearest(key);
    if (suggestion.empty()) throw Error(cat("unknown setting '", key, "'"));
    throw Error(cat("unknown setting '", key, "' (did you mean '", suggestion, "'?)"));
  }
  return *found;
}

void Config::set(const std::string& key, const std::string& value, Provenance provenance) {
  const Setting& spec = setting(key);
  check_value(spec, value);
  Entry& entry = values_[key];
  if (static_cast<int>(provenance) < static_cast<int>(entry.provenance)) return;
  entry.value = value;
  entry.provenance = provenance;
}

long long Config::get_int(const std::string& key) const {
  const Setting& spec = setting(key);
  if (spec.kind != Kind::kInt) throw Error(cat("setting '", key, "' is not an integer"));
  long long value = 0;
  parse_i64(values_.at(key).value, &value);
  return value;
}

double Config::get_real(const std::string& key) const {
  const Setting& spec = setting(key);
  if (spec.kind != Kind::kReal && spec.kind != Kind::kInt) {
    throw Error(cat("setting '", key, "' is not numeric"));
  }
  double value = 0;
  parse_double(values_.at(key).value, &value);
  return value;
}

bool Config::get_bool(const std::string& key) const {
  const Setting& spec = setting(key);
  if (spec.kind != Kind::kBool) throw Error(cat("setting '", key, "' is not a boolean"));
  const std::string& value = values_.at(key).value;
  return value == "true" || value == "1";
}

const std::string& Config::get_string(const std::string& key) const {
  setting(key);
  return values_.at(key).value;
}

Provenance Config::provenance(const std::string& key) const {
  setting(key);
  return values_.at(key).provenance;
}

void Config::check_required() const {
  for (const Setting& spec : schema_->settings()) {
    if (spec.required && values_.at(spec.key).value.empty()) {
      throw Error(cat("missing required setting '", spec.key, "' (pass --", spec.key, " <value>)"));
    }
  }
}

std::string Config::render() const {
  std::string out;
  for (const auto& [key, entry] : values_) {
    out += cat(key, "=", entry.value, " (", provenance_name(entry.provenance), ")\n");
  }
  return out;
}

void apply_file(Config& config, const std::string& path) {
  std::ifstream in = io::open_input(path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw Error(cat(path, ":", number, ": expected key=value, got '", text, "'"));
    }
    try {
      config.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)), Provenance::kFile);
    } catch (const Error& e) {
      throw Error(cat(path, ":", number, ": ", e.what()));
    }
  }
}

void apply_flags(Config& config, std::span<const std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      throw Error(cat("expected a --key flag, got '", arg, "'"));
    }
    std::string key = arg.substr(2);
    std::string value;
    const std::size_t eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
      value = args[++i];
    } else {
      // Bare flag: only booleans may omit the value.
      const Setting* spec = config.schema().find(key);
      if (spec != nullptr && spec->kind == Kind::kBool) {
        value = "true";
      } else {
        throw Error(cat("flag --", key, " needs a value"));
      }
    }
    config.set(key, value, Provenance::kFlag);
  }
}

Config parse_config(const Schema& schema, std::span<const std::string> args) {
  Config config(&schema);

  // The file pass happens first so that flags win regardless of position.
  std::vector<std::string> flag_args;
  std::string file_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string key = args[i];
    if (key == "--config" || key.rfind("--config=", 0) == 0) {
      const std::size_t eq = key.find('=');
      if (eq != std::string::npos) {
        file_path = key.substr(eq + 1);
      } else if (i + 1 < args.size()) {
        file_path = args[++i];
      } else {
        throw Error("flag --config needs a file path");
      }
      if (file_path.empty()) throw Error("flag --config needs a file path");
      continue;
    }
    flag_args.push_back(args[i]);
  }
  if (!file_path.empty()) apply_file(config, file_path);
  apply_flags(config, flag_args);
  return config;
}

}  // namespace newsrec::config
