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

#include "newsrec/model_config.hpp"

#include "newsrec/strings.hpp"

namespace newsrec::model {

Variant parse_variant(const std::string& name) {
  if (name == "self_attn") return Variant::kSelfAttention;
  if (name == "topic_attn") return Variant::kTopicAttention;
  throw Error(cat("unknown model variant '", name, "', expected self_attn or topic_attn"));
}

const char* variant_name(Variant variant) {
  return variant == Variant::kSelfAttention ? "self_attn" : "topic_attn";
}

void ModelConfig::validate() const {
  if (vocab_size < 2) throw Error(cat("vocab_size must be >= 2, got ", vocab_size));
  if (embedding_dim < 1) throw Error(cat("embedding_dim must be >= 1, got ", embedding_dim));
  if (heads < 1) throw Error(cat("heads must be >= 1, got ", heads));
  if (head_dim < 1) throw Error(cat("head_dim must be >= 1, got ", head_dim));
  if (attention_dim < 1) throw Error(cat("attention_dim must be >= 1, got ", attention_dim));
  if (variant == Variant::kTopicAttention) {
    if (topics < 1) throw Error(cat("topics must be >= 1, got ", topics));
    if (!(temperature > 0.0)) {
      throw Error(cat("temperature must be > 0, got ", format_real(temperature)));
    }
  }
}

}  // namespace newsrec::model
