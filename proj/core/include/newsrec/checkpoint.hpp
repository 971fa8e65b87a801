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

#ifndef NEWSREC_CHECKPOINT_HPP_
#define NEWSREC_CHECKPOINT_HPP_

#include <map>
#include <optional>
#include <string>

#include "newsrec/io.hpp"
#include "newsrec/optimizer.hpp"
#include "newsrec/params.hpp"
#include "newsrec/strings.hpp"

// Checkpoint file layout (binary, little-endian):
//   magic "NRECCKP1"
//   length-prefixed header text: "key=value\n" lines carrying the model
//     hyperparameters, the training seed and the value precision (f32)
//   u32 tensor count, then per registry tensor:
//     length-prefixed name, u32 rows, u32 cols, rows*cols f32 values
//     (row-major)
//   u32 optimizer flag; when 1: length-prefixed optimizer text block
//     (learning_rate/beta1/beta2/epsilon/step) followed by first- and
//     second-moment f32 tensors in registry order.
//
// Values are stored in f32 regardless of the in-memory precision, and every
// tensor shape is validated against the header on load, naming the tensor.

namespace newsrec::train {

inline constexpr char kCheckpointMagic[8] = {'N', 'R', 'E', 'C', 'C', 'K', 'P', '1'};

template <class Real>
struct Checkpoint {
  model::Params<Real> params;
  std::uint64_t seed = 0;
  std::optional<OptimizerState<Real>> optimizer;
};

namespace detail {

inline std::map<std::string, std::string> parse_kv_block(const std::string& text,
                                                         const std::string& context) {
  std::map<std::string, std::string> out;
  for (const std::string& raw : split(text, '\n')) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error(cat(context, ": malformed header line: ", line));
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

inline const std::string& require_key(const std::map<std::string, std::string>& kv,
                                      const std::string& key, const std::string& context) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(cat(context, ": header is missing '", key, "'"));
  return it->second;
}

inline long long require_int(const std::map<std::string, std::string>& kv, const std::string& key,
                             const std::string& context) {
  long long value = 0;
  if (!parse_i64(require_key(kv, key, context), &value)) {
    throw Error(cat(context, ": header value for '", key, "' is not an integer"));
  }
  return value;
}

template <class Real>
void write_tensor(std::ostream& out, const std::string& name, const Matrix<Real>& tensor) {
  io::write_string(out, name);
  io::write_u32(out, static_cast<std::uint32_t>(tensor.rows()));
  io::write_u32(out, static_cast<std::uint32_t>(tensor.cols()));
  const Matrix<float> values = tensor.template cast<float>();
  io::write_bytes(out, values.data(), sizeof(float) * static_cast<std::size_t>(values.size()));
}

template <class Real>
void read_tensor(std::istream& in, const std::string& path, const std::string& expected_name,
                 Matrix<Real>& tensor) {
  const std::string name = io::read_string(in, path);
  if (name != expected_name) {
    throw Error(cat(path, ": expected tensor '", expected_name, "', found '", name, "'"));
  }
  const std::uint32_t rows = io::read_u32(in, path);
  const std::uint32_t cols = io::read_u32(in, path);
  if (rows != static_cast<std::uint32_t>(tensor.rows()) ||
      cols != static_cast<std::uint32_t>(tensor.cols())) {
    throw Error(cat(path, ": tensor '", name, "' has shape ", rows, "x", cols, ", model expects ",
                    tensor.rows(), "x", tensor.cols()));
  }
  Matrix<float> values(tensor.rows(), tensor.cols());
  io::read_bytes(in, values.data(), sizeof(float) * static_cast<std::size_t>(values.size()), path);
  tensor = values.template cast<Real>();
}

}  // namespace detail

template <class Real>
void save_checkpoint(const model::Params<Real>& params, std::uint64_t seed,
                     const OptimizerState<Real>* optimizer, const std::string& path) {
  std::ofstream out = io::open_output(path);
  io::write_bytes(out, kCheckpointMagic, sizeof(kCheckpointMagic));

  const model::ModelConfig& c = params.config;
  std::string header;
  header += cat("vocab_size=", c.vocab_size, "\n");
  header += cat("embedding_dim=", c.embedding_dim, "\n");
  header += cat("heads=", c.heads, "\n");
  header += cat("head_dim=", c.head_dim, "\n");
  header += cat("attention_dim=", c.attention_dim, "\n");
  header += cat("topics=", c.topics, "\n");
  header += cat("temperature=", format_real(c.temperature), "\n");
  header += cat("variant=", model::variant_name(c.variant), "\n");
  header += cat("train_embedding=", c.train_embedding ? 1 : 0, "\n");
  header += cat("seed=", seed, "\n");
  header += "precision=f32\n";
  io::write_string(out, header);

  const auto refs = params.registry();
  io::write_u32(out, static_cast<std::uint32_t>(refs.size()));
  for (const auto& ref : refs) detail::write_tensor(out, ref.name, *ref.tensor);

  io::write_u32(out, optimizer ? 1 : 0);
  if (optimizer) {
    std::string opt;
    opt += cat("learning_rate=", format_real(optimizer->learning_rate), "\n");
    opt += cat("beta1=", format_real(optimizer->beta1), "\n");
    opt += cat("beta2=", format_real(optimizer->beta2), "\n");
    opt += cat("epsilon=", format_real(optimizer->epsilon), "\n");
    opt += cat("step=", optimizer->step, "\n");
    io::write_string(out, opt);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      detail::write_tensor(out, cat(refs[i].name, ".m"), optimizer->m[i]);
      detail::write_tensor(out, cat(refs[i].name, ".v"), optimizer->v[i]);
    }
  }
  if (!out) throw Error(cat("failed writing checkpoint: ", path));
}

template <class Real>
Checkpoint<Real> load_checkpoint(const std::string& path) {
  std::ifstream in = io::open_input(path);
  char magic[sizeof(kCheckpointMagic)];
  io::read_bytes(in, magic, sizeof(magic), path);
  if (std::string_view(magic, sizeof(magic)) !=
      std::string_view(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    throw Error(cat("not a checkpoint file: ", path));
  }

  const auto header = detail::parse_kv_block(io::read_string(in, path), path);
  model::ModelConfig config;
  config.vocab_size = static_cast<Index>(detail::require_int(header, "vocab_size", path));
  config.embedding_dim = static_cast<Index>(detail::require_int(header, "embedding_dim", path));
  config.heads = static_cast<Index>(detail::require_int(header, "heads", path));
  config.head_dim = static_cast<Index>(detail::require_int(header, "head_dim", path));
  config.attention_dim = static_cast<Index>(detail::require_int(header, "attention_dim", path));
  config.topics = static_cast<Index>(detail::require_int(header, "topics", path));
  double temperature = 0;
  if (!parse_double(detail::require_key(header, "temperature", path), &temperature)) {
    throw Error(cat(path, ": bad temperature in header"));
  }
  config.temperature = temperature;
  config.variant = model::parse_variant(detail::require_key(header, "variant", path));
  config.train_embedding = detail::require_int(header, "train_embedding", path) != 0;

  Checkpoint<Real> checkpoint;
  checkpoint.seed = static_cast<std::uint64_t>(detail::require_int(header, "seed", path));
  checkpoint.params = model::Params<Real>::zeros(config);

  const std::uint32_t count = io::read_u32(in, path);
  auto refs = checkpoint.params.registry();
  if (count != refs.size()) {
    throw Error(cat(path, ": checkpoint has ", count, " tensors, model expects ", refs.size()));
  }
  for (auto& ref : refs) detail::read_tensor(in, path, ref.name, *ref.tensor);

  if (io::read_u32(in, path) == 1) {
    const auto opt_kv = detail::parse_kv_block(io::read_string(in, path), path);
    OptimizerState<Real> state = OptimizerState<Real>::init(checkpoint.params);
    double value = 0;
    if (!parse_double(detail::require_key(opt_kv, "learning_rate", path), &value)) {
      throw Error(cat(path, ": bad learning_rate in optimizer block"));
    }
    state.learning_rate = value;
    if (!parse_double(detail::require_key(opt_kv, "beta1", path), &value)) {
      throw Error(cat(path, ": bad beta1 in optimizer block"));
    }
    state.beta1 = value;
    if (!parse_double(detail::require_key(opt_kv, "beta2", path), &value)) {
      throw Error(cat(path, ": bad beta2 in optimizer block"));
    }
    state.beta2 = value;
    if (!parse_double(detail::require_key(opt_kv, "epsilon", path), &value)) {
      throw Error(cat(path, ": bad epsilon in optimizer block"));
    }
    state.epsilon = value;
    state.step = detail::require_int(opt_kv, "step", path);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      detail::read_tensor(in, path, cat(refs[i].name, ".m"), state.m[i]);
      detail::read_tensor(in, path, cat(refs[i].name, ".v"), state.v[i]);
    }
    checkpoint.optimizer = std::move(state);
  }
  return checkpoint;
}

}  // namespace newsrec::train

#endif  // NEWSREC_CHECKPOINT_HPP_
