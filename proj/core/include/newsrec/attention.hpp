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

#ifndef NEWSREC_ATTENTION_HPP_
#define NEWSREC_ATTENTION_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "newsrec/params.hpp"
#include "newsrec/types.hpp"

// Multi-head self-attention and additive attention pooling over "segments":
// contiguous row ranges of a flat input matrix, each an independent
// sequence. Rectangular inputs (fixed length plus a validity mask) and
// ragged inputs (variable length, every row valid) share the same kernels.
//
// Masked positions take no part in any softmax: they are excluded from the
// key set and their query rows produce exact zero outputs, so the values
// stored in masked rows can never influence a result, bit for bit. A fully
// masked segment yields a zero vector. Gradients observe the same masking.
//
// All gradient formulas are written out by hand; backward passes accumulate
// (+=) into caller-provided gradient groups.

namespace newsrec::model {

struct Segment {
  Index start;               // first row of the segment in the flat input
  Index len;                 // number of rows
  const std::uint8_t* mask;  // len flags, 1 = valid; nullptr = all valid
};

inline std::vector<Segment> rect_segments(Index count, Index seq_len, const ByteMatrix* mask) {
  if (mask != nullptr && (mask->rows() != count || mask->cols() != seq_len)) {
    throw Error(cat("mask is ", mask->rows(), "x", mask->cols(), ", expected ", count, "x",
                    seq_len));
  }
  std::vector<Segment> segments;
  segments.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    segments.push_back({i * seq_len, seq_len, mask ? mask->row(i).data() : nullptr});
  }
  return segments;
}

inline std::vector<Segment> ragged_segments(std::span<const Index> offsets) {
  if (offsets.size() < 2) throw Error("ragged offsets need at least two entries");
  std::vector<Segment> segments;
  segments.reserve(offsets.size() - 1);
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    if (offsets[i + 1] < offsets[i]) throw Error("ragged offsets must be non-decreasing");
    segments.push_back({offsets[i], offsets[i + 1] - offsets[i], nullptr});
  }
  return segments;
}

template <class Real>
struct MhsaTrace {
  Matrix<Real> q, k, v;                // projections, [rows, model_dim]
  Matrix<Real> concat;                 // per-head outputs before the output projection
  std::vector<Matrix<Real>> attn;      // per segment: heads stacked, [heads*len, len]
};

template <class Real>
struct PoolTrace {
  Matrix<Real> pre;      // tanh(weight h + bias) rows, [rows, attention_dim]
  Vector<Real> weights;  // flat attention weight per row (zero when masked)
};

namespace detail {

// In-place softmax over the `valid` (sorted) entries of a contiguous row;
// all other entries are set to zero. `valid` must be non-empty.
template <class Real>
void masked_softmax_row(Real* row, Index len, const std::vector<Index>& valid) {
  Real max_value = row[valid[0]];
  for (const Index j : valid) max_value = std::max(max_value, row[j]);
  Real sum = Real(0);
  std::size_t vi = 0;
  for (Index j = 0; j < len; ++j) {
    if (vi < valid.size() && valid[vi] == j) {
      row[j] = std::exp(row[j] - max_value);
      sum += row[j];
      ++vi;
    } else {
      row[j] = Real(0);
    }
  }
  const Real inv = Real(1) / sum;
  for (const Index j : valid) row[j] *= inv;
}

inline std::vector<Index> valid_positions(const Segment& segment) {
  std::vector<Index> valid;
  valid.reserve(static_cast<std::size_t>(segment.len));
  for (Index i = 0; i < segment.len; ++i) {
    if (segment.mask == nullptr || segment.mask[i] != 0) valid.push_back(i);
  }
  return valid;
}

}  // namespace detail

// x: [total_rows, in_dim] flat sequences. Returns [total_rows, model_dim].
template <class Real>
Matrix<Real> mhsa_forward(const Matrix<Real>& x, const std::vector<Segment>& segments,
                          const AttentionParams<Real>& p, Index heads,
                          MhsaTrace<Real>* trace = nullptr) {
  const Index dm = static_cast<Index>(p.query.cols());
  if (p.query.rows() != x.cols()) {
    throw Error(cat("attention input width ", x.cols(), " does not match projection rows ",
                    p.query.rows()));
  }
  if (dm % heads != 0) throw Error(cat("model dim ", dm, " not divisible by ", heads, " heads"));
  const Index dh = dm / heads;
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(dh));

  Matrix<Real> q(x.rows(), dm), k(x.rows(), dm), v(x.rows(), dm);
  q.noalias() = x * p.query;
  k.noalias() = x * p.key;
  v.noalias() = x * p.value;
  Matrix<Real> concat = Matrix<Real>::Zero(x.rows(), dm);

  if (trace) trace->attn.clear();
  Matrix<Real> scores;
  for (const Segment& segment : segments) {
    const Index s = segment.len;
    if (trace) trace->attn.emplace_back();
    if (s == 0) continue;
    const std::vector<Index> valid = detail::valid_positions(segment);
    Matrix<Real>* attn = nullptr;
    if (trace) {
      trace->attn.back().resize(heads * s, s);
      attn = &trace->attn.back();
    }
    for (Index h = 0; h < heads; ++h) {
      const auto qh = q.block(segment.start, h * dh, s, dh);
      const auto kh = k.block(segment.start, h * dh, s, dh);
      const auto vh = v.block(segment.start, h * dh, s, dh);
      scores.resize(s, s);
      scores.noalias() = qh * kh.transpose();
      scores *= scale;
      std::size_t vi = 0;
      for (Index i = 0; i < s; ++i) {
        if (vi < valid.size() && valid[vi] == i) {
          detail::masked_softmax_row(scores.row(i).data(), s, valid);
          ++vi;
        } else {
          scores.row(i).setZero();
        }
      }
      if (attn) attn->block(h * s, 0, s, s) = scores;
      concat.block(segment.start, h * dh, s, dh).noalias() = scores * vh;
    }
  }

  Matrix<Real> out(x.rows(), dm);
  out.noalias() = concat * p.output;
  if (trace) {
    trace->q = std::move(q);
    trace->k = std::move(k);
    trace->v = std::move(v);
    trace->concat = std::move(concat);
  }
  return out;
}

// Backward of mhsa_forward. Accumulates parameter gradients into `grads`
// and returns the gradient with respect to x.
template <class Real>
Matrix<Real> mhsa_backward(const Matrix<Real>& d_out, const Matrix<Real>& x,
                           const std::vector<Segment>& segments, const AttentionParams<Real>& p,
                           Index heads, const MhsaTrace<Real>& trace,
                           AttentionParams<Real>& grads) {
  const Index dm = static_cast<Index>(p.query.cols());
  const Index dh = dm / heads;
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(dh));

  Matrix<Real> d_concat(d_out.rows(), dm);
  d_concat.noalias() = d_out * p.output.transpose();
  grads.output.noalias() += trace.concat.transpose() * d_out;

  Matrix<Real> dq = Matrix<Real>::Zero(x.rows(), dm);
  Matrix<Real> dk = Matrix<Real>::Zero(x.rows(), dm);
  Matrix<Real> dv = Matrix<Real>::Zero(x.rows(), dm);

  Matrix<Real> d_attn, d_scores;
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const Segment& segment = segments[si];
    const Index s = segment.len;
    if (s == 0) continue;
    const Matrix<Real>& attn = trace.attn[si];
    if (attn.rows() == 0) continue;  // fully masked segment
    for (Index h = 0; h < heads; ++h) {
      const auto attn_h = attn.block(h * s, 0, s, s);
      const auto d_oh = d_concat.block(segment.start, h * dh, s, dh);
      const auto qh = trace.q.block(segment.start, h * dh, s, dh);
      const auto kh = trace.k.block(segment.start, h * dh, s, dh);
      const auto vh = trace.v.block(segment.start, h * dh, s, dh);

      d_attn.resize(s, s);
      d_attn.noalias() = d_oh * vh.transpose();
      dv.block(segment.start, h * dh, s, dh).noalias() = attn_h.transpose() * d_oh;

      // Softmax backward, row by row. Rows and columns of masked positions
      // carry zero attention, so they drop out on their own.
      d_scores.resize(s, s);
      for (Index i = 0; i < s; ++i) {
        const Real dot = attn_h.row(i).dot(d_attn.row(i));
        d_scores.row(i) = attn_h.row(i).cwiseProduct(
            (d_attn.row(i).array() - dot).matrix());
      }
      dq.block(segment.start, h * dh, s, dh).noalias() = d_scores * kh * scale;
      dk.block(segment.start, h * dh, s, dh).noalias() = d_scores.transpose() * qh * scale;
    }
  }

  grads.query.noalias() += x.transpose() * dq;
  grads.key.noalias() += x.transpose() * dk;
  grads.value.noalias() += x.transpose() * dv;

  Matrix<Real> dx(x.rows(), x.cols());
  dx.noalias() = dq * p.query.transpose();
  dx.noalias() += dk * p.key.transpose();
  dx.noalias() += dv * p.value.transpose();
  return dx;
}

// h: [total_rows, model_dim]. Returns one pooled vector per segment,
// [segments, model_dim]. a = softmax(vector . tanh(weight h + bias)).
template <class Real>
Matrix<Real> additive_pool_forward(const Matrix<Real>& h, const std::vector<Segment>& segments,
                                   const PoolParams<Real>& p, PoolTrace<Real>* trace = nullptr) {
  const Index dm = static_cast<Index>(h.cols());
  if (p.weight.cols() != dm) {
    throw Error(cat("pool weight expects width ", p.weight.cols(), ", input has ", dm));
  }
  Matrix<Real> pre(h.rows(), p.weight.rows());
  pre.noalias() = h * p.weight.transpose();
  pre.rowwise() += p.bias.row(0);
  pre = pre.array().tanh().matrix();

  Vector<Real> scores(h.rows());
  scores.noalias() = pre * p.vector.row(0).transpose();
  Vector<Real> weights = Vector<Real>::Zero(h.rows());

  Matrix<Real> out = Matrix<Real>::Zero(static_cast<Index>(segments.size()), dm);
  for (std::size_t si = 0; si < segments.size(); ++si) {
    const Segment& segment = segments[si];
    if (segment.len == 0) continue;
    const std::vector<Index> valid = detail::valid_positions(segment);
    if (valid.empty()) continue;
    detail::masked_softmax_row(scores.data() + segment.start, segment.len, valid);
    weights.segment(segment.start, segment.len) = scores.segment(segment.start, segment.len);
    out.row(static_cast<Index>(si)).noalias() =
        weights.segment(segment.start, segment.len).transpose() *
        h.middleRows(segment.start, segment.len);
  }
  if (trace) {
    trace->pre = std::move(pre);
    trace->weights = std::move(weights);
  }
  return out;
}

// Backward of additive_pool_forward; returns the gradient w.r.t. h.
template <class Real>
Matrix<Real> additive_pool_backward(const Matrix<Real>& d_pooled, const Matrix<Real>& h,
                                    const std::vector<Segment>& segments, const PoolParams<Real>& p,
                                    const PoolTrace<Real>& trace, PoolParams<Real>& grads) {
  Matrix<Real> dh = Matrix<Real>::Zero(h.rows(), h.cols());
  Vector<Real> ds = Vector<Real>::Zero(h.rows());

  for (std::size_t si = 0; si < segments.size(); ++si) {
    const Segment& segment = segments[si];
    if (segment.len == 0) continue;
    const auto a = trace.weights.segment(segment.start, segment.len);
    const auto dy = d_pooled.row(static_cast<Index>(si));
    Vector<Real> da(segment.len);
    da.noalias() = h.middleRows(segment.start, segment.len) * dy.transpose();
    const Real dot = a.dot(da);
    ds.segment(segment.start, segment.len) =
        a.cwiseProduct((da.array() - dot).matrix());
    dh.middleRows(segment.start, segment.len).noalias() += a * dy;
  }

  Matrix<Real> dz(h.rows(), p.weight.rows());
  dz.noalias() = ds * p.vector.row(0);
  dz.array() *= (Real(1) - trace.pre.array().square());

  grads.vector.noalias() += (trace.pre.transpose() * ds).transpose();
  grads.weight.noalias() += dz.transpose() * h;
  grads.bias.noalias() += dz.colwise().sum();
  dh.noalias() += dz * p.weight;
  return dh;
}

// Rectangular convenience wrappers: N sequences of fixed length with a mask.
template <class Real>
Matrix<Real> multi_head_self_attention(const Matrix<Real>& x, Index seq_len,
                                       const ByteMatrix& mask, const AttentionParams<Real>& p,
                                       Index heads) {
  const Index count = static_cast<Index>(mask.rows());
  if (x.rows() != count * seq_len) {
    throw Error(cat("expected ", count * seq_len, " input rows, got ", x.rows()));
  }
  return mhsa_forward(x, rect_segments(count, seq_len, &mask), p, heads);
}

template <class Real>
Matrix<Real> additive_attention_pool(const Matrix<Real>& h, Index seq_len, const ByteMatrix& mask,
                                     const PoolParams<Real>& p) {
  const Index count = static_cast<Index>(mask.rows());
  if (h.rows() != count * seq_len) {
    throw Error(cat("expected ", count * seq_len, " input rows, got ", h.rows()));
  }
  return additive_pool_forward(h, rect_segments(count, seq_len, &mask), p);
}

}  // namespace newsrec::model

#endif  // NEWSREC_ATTENTION_HPP_
