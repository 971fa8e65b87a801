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

#include "newsrec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace newsrec::train {
namespace detail {

namespace {

const std::vector<std::string>& known_names() {
  static const std::vector<std::string> names = {
      "attention_dim", "batch_size", "embedding_dim", "epochs",    "head_dim",
      "heads",         "history_max", "learning_rate", "negatives", "patience",
      "temperature",   "topics"};
  return names;
}

Index int_setting(const std::string& name, double value) {
  if (std::floor(value) != value || std::abs(value) > 1e9) {
    throw Error(cat("grid value for ", name, " must be an integer, got ", format_real(value)));
  }
  return static_cast<Index>(value);
}

}  // namespace

double metric_value(const eval::MetricsReport& report, const std::string& objective) {
  if (objective == "auc") return report.auc;
  if (objective == "mrr") return report.mrr;
  if (objective == "ndcg5") return report.ndcg5;
  if (objective == "ndcg10") return report.ndcg10;
  throw Error(cat("unknown objective metric '", objective, "'"));
}

std::vector<std::pair<std::string, std::vector<double>>> normalize_axes(const GridSpec& grid) {
  auto axes = grid.axes;
  std::sort(axes.begin(), axes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::set<std::string> seen;
  for (const auto& [name, values] : axes) {
    const auto& names = known_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      std::string nearest = names.front();
      std::size_t best = std::numeric_limits<std::size_t>::max();
      for (const std::string& candidate : names) {
        const std::size_t d = edit_distance(name, candidate);
        if (d < best) {
          best = d;
          nearest = candidate;
        }
      }
      throw Error(cat("unknown grid axis '", name, "' (did you mean '", nearest, "'?)"));
    }
    if (!seen.insert(name).second) throw Error(cat("duplicate grid axis '", name, "'"));
    if (values.empty()) throw Error(cat("grid axis '", name, "' has no candidate values"));
  }
  return axes;
}

void apply_setting(const std::string& name, double value, TrainConfig& train_config,
                   model::ModelConfig& model_config) {
  if (name == "learning_rate") {
    train_config.learning_rate = value;
  } else if (name == "temperature") {
    model_config.temperature = value;
  } else if (name == "epochs") {
    train_config.epochs = int_setting(name, value);
  } else if (name == "patience") {
    train_config.patience = int_setting(name, value);
  } else if (name == "batch_size") {
    train_config.plan.batch_size = int_setting(name, value);
  } else if (name == "negatives") {
    train_config.plan.negatives = int_setting(name, value);
  } else if (name == "history_max") {
    train_config.plan.history_max = int_setting(name, value);
  } else if (name == "heads") {
    model_config.heads = int_setting(name, value);
  } else if (name == "head_dim") {
    model_config.head_dim = int_setting(name, value);
  } else if (name == "attention_dim") {
    model_config.attention_dim = int_setting(name, value);
  } else if (name == "topics") {
    model_config.topics = int_setting(name, value);
  } else if (name == "embedding_dim") {
    model_config.embedding_dim = int_setting(name, value);
  } else {
    throw Error(cat("unknown grid axis '", name, "'"));
  }
}

std::string render_assignment(const std::vector<std::pair<std::string, double>>& assignment) {
  std::string out;
  for (const auto& [name, value] : assignment) {
    if (!out.empty()) out += " ";
    out += cat(name, "=", format_real(value));
  }
  return out;
}

}  // namespace detail

std::string render_grid_table(const GridResult& result) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"cell", "assignment", result.objective, "auc", "mrr", "ndcg5", "ndcg10",
                  "best_epoch", "status"});
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const GridCell& cell = result.cells[i];
    std::vector<std::string> row;
    row.push_back(cat(i, result.winner == static_cast<int>(i) ? " *" : ""));
    row.push_back(detail::render_assignment(cell.assignment));
    if (cell.ok) {
      row.push_back(format_fixed(cell.objective, 6));
      row.push_back(format_fixed(cell.dev.auc, 6));
      row.push_back(format_fixed(cell.dev.mrr, 6));
      row.push_back(format_fixed(cell.dev.ndcg5, 6));
      row.push_back(format_fixed(cell.dev.ndcg10, 6));
      row.push_back(cat(cell.best_epoch));
      row.push_back("ok");
    } else {
      for (int c = 0; c < 6; ++c) row.push_back("-");
      row.push_back(cat("failed: ", cell.error));
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out += std::string(widths[c] - row[c].size() + 2, ' ');
    }
    out += "\n";
  }
  return out;
}

}  // namespace newsrec::train
