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

#ifndef NEWSREC_TYPES_HPP_
#define NEWSREC_TYPES_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace newsrec {

// Row/column index type used throughout. Token ids, feature-matrix rows and
// batch offsets all fit comfortably in 32 bits for the corpus sizes this
// library targets.
using Index = std::int32_t;

// Dense row-major matrix. Row-major matches the access pattern everywhere:
// one row per token, per news article or per impression.
template <class Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<std::int32_t>;
using ByteMatrix = Matrix<std::uint8_t>;

// Single error type for validation, parsing and I/O failures. Messages are
// written for end users and name the offending file, line, id or tensor.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace newsrec

#endif  // NEWSREC_TYPES_HPP_
