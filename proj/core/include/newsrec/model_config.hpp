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

#ifndef NEWSREC_MODEL_CONFIG_HPP_
#define NEWSREC_MODEL_CONFIG_HPP_

#include <string>

#include "newsrec/types.hpp"

namespace newsrec::model {

// Two encoder variants share the attention backbone. The topic variant adds
// a word-level topic head whose mixtures contribute to the relevance score.
enum class Variant { kSelfAttention, kTopicAttention };

Variant parse_variant(const std::string& name);  // "self_attn" | "topic_attn"
const char* variant_name(Variant variant);

struct ModelConfig {
  Index vocab_size = 0;
  Index embedding_dim = 300;  // D, word vector width
  Index heads = 16;
  Index head_dim = 16;        // per-head width; model width = heads * head_dim
  Index attention_dim = 200;  // additive-attention hidden width
  Index topics = 50;          // topic count (topic variant)
  double temperature = 1.0;   // softmax temperature of the topic head
  Variant variant = Variant::kSelfAttention;
  bool train_embedding = true;

  Index model_dim() const { return heads * head_dim; }

  // Throws Error on out-of-range values.
  void validate() const;
};

}  // namespace newsrec::model

#endif  // NEWSREC_MODEL_CONFIG_HPP_
