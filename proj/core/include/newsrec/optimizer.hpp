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

#ifndef NEWSREC_OPTIMIZER_HPP_
#define NEWSREC_OPTIMIZER_HPP_

#include <cmath>
#include <vector>

#include "newsrec/params.hpp"
#include "newsrec/types.hpp"

namespace newsrec::train {

// Adam with bias correction. Moment tensors align with the parameter
// registry order; frozen tensors keep zero moments and are never touched.
template <class Real>
struct OptimizerState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;  // completed updates
  std::vector<Matrix<Real>> m;
  std::vector<Matrix<Real>> v;

  static OptimizerState init(const model::Params<Real>& params, double learning_rate = 1e-4,
                             double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8) {
    if (!(learning_rate > 0)) {
      throw Error(cat("learning rate must be > 0, got ", format_real(learning_rate)));
    }
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
      throw Error("adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0)) throw Error("adam epsilon must be > 0");
    OptimizerState state;
    state.learning_rate = learning_rate;
    state.beta1 = beta1;
    state.beta2 = beta2;
    state.epsilon = epsilon;
    for (const auto& ref : params.registry()) {
      state.m.push_back(Matrix<Real>::Zero(ref.tensor->rows(), ref.tensor->cols()));
      state.v.push_back(Matrix<Real>::Zero(ref.tensor->rows(), ref.tensor->cols()));
    }
    return state;
  }
};

// One Adam update. Gradient tensors must mirror the parameter registry
// shape-for-shape (Error naming the tensor otherwise). Skips tensors marked
// non-trainable; re-zeroes the padding embedding row afterwards.
template <class Real>
void adam_step(model::Params<Real>& params, const model::Gradients<Real>& grads,
               OptimizerState<Real>& state) {
  auto param_refs = params.registry();
  const auto grad_refs = grads.registry();
  if (param_refs.size() != grad_refs.size() || param_refs.size() != state.m.size()) {
    throw Error(cat("optimizer registries disagree: ", param_refs.size(), " parameters, ",
                    grad_refs.size(), " gradients, ", state.m.size(), " moment slots"));
  }
  for (std::size_t i = 0; i < param_refs.size(); ++i) {
    const auto& p = *param_refs[i].tensor;
    const auto& g = *grad_refs[i].tensor;
    if (p.rows() != g.rows() || p.cols() != g.cols()) {
      throw Error(cat("gradient for ", param_refs[i].name, " is ", g.rows(), "x", g.cols(),
                      ", parameter is ", p.rows(), "x", p.cols()));
    }
  }

  ++state.step;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const Real b1 = static_cast<Real>(state.beta1);
  const Real b2 = static_cast<Real>(state.beta2);
  const Real lr1 = static_cast<Real>(state.learning_rate / correction1);
  const Real inv_c2 = static_cast<Real>(1.0 / correction2);
  const Real eps = static_cast<Real>(state.epsilon);

  for (std::size_t i = 0; i < param_refs.size(); ++i) {
    if (!param_refs[i].trainable) continue;
    auto& p = *param_refs[i].tensor;
    const auto& g = *grad_refs[i].tensor;
    auto& m = state.m[i];
    auto& v = state.v[i];
    m = b1 * m + (Real(1) - b1) * g;
    v = (b2 * v.array() + (Real(1) - b2) * g.array().square()).matrix();
    p.array() -= lr1 * m.array() / ((v.array() * inv_c2).sqrt() + eps);
  }
  params.embedding.row(0).setZero();
  ++params.revision;
}

}  // namespace newsrec::train

#endif  // NEWSREC_OPTIMIZER_HPP_
