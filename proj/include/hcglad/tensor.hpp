// Copyright 2026 The hcglad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense reverse-mode differentiation over row-major double matrices.
//
// A Tape records every operation executed during one forward pass. Leaf
// tensors (parameters and constants) live outside any tape; intermediate
// tensors are produced by Tape methods and carry the index of the entry that
// produced them. `Tape::backward` walks the entries in exact reverse order.
//
// Gradient semantics: leaf gradients accumulate (+=) across backward calls
// until `zero_grad`; intermediate gradients are reset at the start of each
// backward so a second call on the same tape adds exactly one more copy of
// every leaf gradient.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcglad/error.hpp"

namespace hcglad {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

enum class OpKind {
  kMatmul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kExp,
  kLog,
  kNeg,
  kRelu,
  kSum,
  kMean,
  kRowSum,
  kRowMean,
  kAddRow,
  kTranspose,
  kSliceRows,
  kConcatRows,
  kDiagonal,
  kMaskedRowLogSumExp,
  kBlockDiagMatmul,
  kSegmentMean,
  kExpOrigin,
  kLogOrigin,
  kLorentzDist,
  kEuclideanDist,
};

inline std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kNeg: return "neg";
    case OpKind::kRelu: return "relu";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kRowSum: return "rowsum";
    case OpKind::kRowMean: return "rowmean";
    case OpKind::kAddRow: return "add_row";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kSliceRows: return "slice_rows";
    case OpKind::kConcatRows: return "concat_rows";
    case OpKind::kDiagonal: return "diagonal";
    case OpKind::kMaskedRowLogSumExp: return "masked_row_logsumexp";
    case OpKind::kBlockDiagMatmul: return "block_diag_matmul";
    case OpKind::kSegmentMean: return "segment_mean";
    case OpKind::kExpOrigin: return "exp_origin";
    case OpKind::kLogOrigin: return "log_origin";
    case OpKind::kLorentzDist: return "lorentz_dist";
    case OpKind::kEuclideanDist: return "euclidean_dist";
  }
  return "unknown";
}

enum class ElementwiseOp { kAdd, kSub, kMul, kScale, kExp, kLog, kNeg, kRelu };
enum class ReduceOp { kSum, kMean, kRowSum, kRowMean };

inline std::string shape_string(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

namespace detail {

struct TensorState {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
  // Index of the producing tape entry; -1 for leaves.
  std::int64_t op_index = -1;
};

}  // namespace detail

class Tape;

/// Shared handle to a matrix that may take part in a recorded computation.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value) { return make(std::move(value), false); }
  static Tensor parameter(Matrix value) { return make(std::move(value), true); }
  static Tensor scalar(double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return constant(std::move(m));
  }

  explicit operator bool() const { return static_cast<bool>(state_); }

  const Matrix& value() const { return state_->value; }
  /// Leaves only; optimizers and finite-difference checks write through this.
  Matrix& mutable_value() { return state_->value; }
  const Matrix& grad() const { return state_->grad; }
  Matrix& mutable_grad() { return state_->grad; }

  Index rows() const { return state_->value.rows(); }
  Index cols() const { return state_->value.cols(); }
  bool requires_grad() const { return state_->requires_grad; }
  bool is_leaf() const { return state_->op_index < 0; }
  std::int64_t op_index() const { return state_->op_index; }

  double item() const {
    if (rows() != 1 || cols() != 1) {
      fail(ErrorKind::kRank,
           "item() needs a 1x1 tensor, got " + shape_string(value()));
    }
    return state_->value(0, 0);
  }

  void zero_grad() {
    if (state_->requires_grad) state_->grad.setZero();
  }

  bool same_as(const Tensor& other) const { return state_ == other.state_; }

 private:
  friend class Tape;

  static Tensor make(Matrix value, bool requires_grad) {
    Tensor t;
    t.state_ = std::make_shared<detail::TensorState>();
    t.state_->requires_grad = requires_grad;
    if (requires_grad) {
      t.state_->grad = Matrix::Zero(value.rows(), value.cols());
    }
    t.state_->value = std::move(value);
    return t;
  }

  std::shared_ptr<detail::TensorState> state_;
};

/// Ordered record of one forward pass. Single-writer; not thread-safe.
class Tape {
 public:
  // Constants used by the hyperbolic ops.
  static constexpr double kAcoshMax = 1e15;
  static constexpr double kAcoshGradFloor = 1e-12;
  static constexpr double kSeriesThreshold = 1e-3;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return entries_.size(); }

  std::vector<OpKind> op_sequence() const {
    std::vector<OpKind> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.kind);
    return out;
  }

  /// Hash of every branch taken by piecewise ops (relu signs, distance
  /// clamps). Two forward passes with equal signatures are smooth along the
  /// segment between their inputs for finite-difference purposes.
  std::uint64_t branch_signature() const { return branch_hash_; }

  /// Test fixture: multiply the upstream gradient of every `kind` entry by
  /// `factor` during backward, corrupting that rule.
  void inject_backward_fault(OpKind kind, double factor) {
    fault_kind_ = kind;
    fault_factor_ = factor;
    fault_enabled_ = true;
  }

  // ---- elementwise -------------------------------------------------------

  Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    return record(OpKind::kAdd, {a, b}, a.value() + b.value(),
                  [](const Matrix& g, Grads& grads) {
                    grads.add(0, g);
                    grads.add(1, g);
                  });
  }

  Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    return record(OpKind::kSub, {a, b}, a.value() - b.value(),
                  [](const Matrix& g, Grads& grads) {
                    grads.add(0, g);
                    grads.add(1, -g);
                  });
  }

  Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Matrix av = a.value(), bv = b.value();
    Matrix out = av.cwiseProduct(bv);
    return record(OpKind::kMul, {a, b}, std::move(out),
                  [av, bv](const Matrix& g, Grads& grads) {
                    grads.add(0, g.cwiseProduct(bv));
                    grads.add(1, g.cwiseProduct(av));
                  });
  }

  Tensor scale(const Tensor& a, double s) {
    return record(OpKind::kScale, {a}, a.value() * s,
                  [s](const Matrix& g, Grads& grads) { grads.add(0, g * s); });
  }

  Tensor neg(const Tensor& a) {
    return record(OpKind::kNeg, {a}, -a.value(),
                  [](const Matrix& g, Grads& grads) { grads.add(0, -g); });
  }

  Tensor exp(const Tensor& a) {
    Matrix out = a.value().array().exp().matrix();
    Matrix saved = out;
    return record(OpKind::kExp, {a}, std::move(out),
                  [saved](const Matrix& g, Grads& grads) {
                    grads.add(0, g.cwiseProduct(saved));
                  });
  }

  Tensor log(const Tensor& a) {
    const Matrix& v = a.value();
    for (Index i = 0; i < v.size(); ++i) {
      if (!(v.data()[i] > 0.0)) {
        std::ostringstream os;
        os << "log of non-positive entry " << v.data()[i] << " at flat index "
           << i;
        fail(ErrorKind::kDomain, os.str());
      }
    }
    Matrix saved = v;
    return record(OpKind::kLog, {a}, v.array().log().matrix(),
                  [saved](const Matrix& g, Grads& grads) {
                    grads.add(0, g.cwiseQuotient(saved));
                  });
  }

  /// Backward at exactly zero is zero.
  Tensor relu(const Tensor& a) {
    Matrix mask = (a.value().array() > 0.0).cast<double>().matrix();
    for (Index i = 0; i < mask.size(); ++i) mix_branch(mask.data()[i] > 0.0);
    Matrix out = a.value().cwiseProduct(mask);
    return record(OpKind::kRelu, {a}, std::move(out),
                  [mask](const Matrix& g, Grads& grads) {
                    grads.add(0, g.cwiseProduct(mask));
                  });
  }

  Tensor elementwise(ElementwiseOp op, const Tensor& a,
                     const Tensor& b = Tensor(), double s = 1.0) {
    switch (op) {
      case ElementwiseOp::kAdd: return add(a, b);
      case ElementwiseOp::kSub: return sub(a, b);
      case ElementwiseOp::kMul: return mul(a, b);
      case ElementwiseOp::kScale: return scale(a, s);
      case ElementwiseOp::kExp: return exp(a);
      case ElementwiseOp::kLog: return log(a);
      case ElementwiseOp::kNeg: return neg(a);
      case ElementwiseOp::kRelu: return relu(a);
    }
    fail(ErrorKind::kPrecondition, "unknown elementwise op");
  }

  // ---- linear algebra ----------------------------------------------------

  Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
      fail(ErrorKind::kDimension, "matmul shape mismatch: " +
                                      shape_string(a.value()) + " * " +
                                      shape_string(b.value()));
    }
    Matrix av = a.value(), bv = b.value();
    Matrix out = av * bv;
    return record(OpKind::kMatmul, {a, b}, std::move(out),
                  [av, bv](const Matrix& g, Grads& grads) {
                    if (grads.wants(0)) grads.add(0, g * bv.transpose());
                    if (grads.wants(1)) grads.add(1, av.transpose() * g);
                  });
  }

  Tensor transpose(const Tensor& a) {
    return record(OpKind::kTranspose, {a}, a.value().transpose(),
                  [](const Matrix& g, Grads& grads) {
                    grads.add(0, g.transpose());
                  });
  }

  /// x (n x d) + bias (1 x d) broadcast over rows.
  Tensor add_row(const Tensor& x, const Tensor& bias) {
    if (bias.rows() != 1 || bias.cols() != x.cols()) {
      fail(ErrorKind::kDimension, "add_row shape mismatch: " +
                                      shape_string(x.value()) + " + " +
                                      shape_string(bias.value()));
    }
    Matrix out = x.value().rowwise() + bias.value().row(0);
    return record(OpKind::kAddRow, {x, bias}, std::move(out),
                  [](const Matrix& g, Grads& grads) {
                    grads.add(0, g);
                    if (grads.wants(1)) grads.add(1, g.colwise().sum());
                  });
  }

  // ---- reductions --------------------------------------------------------

  Tensor reduce(ReduceOp op, const Tensor& t) {
    switch (op) {
      case ReduceOp::kSum: return sum(t);
      case ReduceOp::kMean: return mean(t);
      case ReduceOp::kRowSum: return rowsum(t);
      case ReduceOp::kRowMean: return rowmean(t);
    }
    fail(ErrorKind::kPrecondition, "unknown reduce op");
  }

  Tensor sum(const Tensor& t) {
    const Index r = t.rows(), c = t.cols();
    Matrix out(1, 1);
    out(0, 0) = t.value().sum();
    return record(OpKind::kSum, {t}, std::move(out),
                  [r, c](const Matrix& g, Grads& grads) {
                    grads.add(0, Matrix::Constant(r, c, g(0, 0)));
                  });
  }

  Tensor mean(const Tensor& t) {
    const Index r = t.rows(), c = t.cols();
    if (r * c == 0) fail(ErrorKind::kEmptyReduction, "mean over zero elements");
    const double inv = 1.0 / static_cast<double>(r * c);
    Matrix out(1, 1);
    out(0, 0) = t.value().sum() * inv;
    return record(OpKind::kMean, {t}, std::move(out),
                  [r, c, inv](const Matrix& g, Grads& grads) {
                    grads.add(0, Matrix::Constant(r, c, g(0, 0) * inv));
                  });
  }

  Tensor rowsum(const Tensor& t) {
    const Index c = t.cols();
    return record(OpKind::kRowSum, {t}, t.value().rowwise().sum(),
                  [c](const Matrix& g, Grads& grads) {
                    grads.add(0, g.replicate(1, c));
                  });
  }

  Tensor rowmean(const Tensor& t) {
    const Index c = t.cols();
    if (c == 0 || t.rows() == 0) {
      fail(ErrorKind::kEmptyReduction, "rowmean over zero columns");
    }
    const double inv = 1.0 / static_cast<double>(c);
    return record(OpKind::kRowMean, {t}, t.value().rowwise().sum() * inv,
                  [c, inv](const Matrix& g, Grads& grads) {
                    grads.add(0, g.replicate(1, c) * inv);
                  });
  }

  /// out_i = log sum_k mask_ik exp(s_ik). Every row needs a nonzero mask.
  Tensor masked_row_logsumexp(const Tensor& s, const Matrix& mask) {
    if (mask.rows() != s.rows() || mask.cols() != s.cols()) {
      fail(ErrorKind::kDimension, "masked_row_logsumexp mask " +
                                      shape_string(mask) + " vs input " +
                                      shape_string(s.value()));
    }
    const Matrix& v = s.value();
    Matrix out(v.rows(), 1);
    Matrix weights = Matrix::Zero(v.rows(), v.cols());
    for (Index i = 0; i < v.rows(); ++i) {
      double m = -std::numeric_limits<double>::infinity();
      bool any = false;
      for (Index k = 0; k < v.cols(); ++k) {
        if (mask(i, k) != 0.0) {
          any = true;
          m = std::max(m, v(i, k));
        }
      }
      if (!any) {
        fail(ErrorKind::kEmptyReduction,
             "masked_row_logsumexp: row " + std::to_string(i) +
                 " has no unmasked entries");
      }
      double total = 0.0;
      for (Index k = 0; k < v.cols(); ++k) {
        if (mask(i, k) != 0.0) {
          weights(i, k) = std::exp(v(i, k) - m);
          total += weights(i, k);
        }
      }
      weights.row(i) /= total;
      out(i, 0) = m + std::log(total);
    }
    return record(OpKind::kMaskedRowLogSumExp, {s}, std::move(out),
                  [weights](const Matrix& g, Grads& grads) {
                    Matrix gs = weights;
                    for (Index i = 0; i < gs.rows(); ++i) gs.row(i) *= g(i, 0);
                    grads.add(0, gs);
                  });
  }

  // ---- structural --------------------------------------------------------

  Tensor slice_rows(const Tensor& t, Index begin, Index count) {
    if (begin < 0 || count < 0 || begin + count > t.rows()) {
      fail(ErrorKind::kDimension,
           "slice_rows [" + std::to_string(begin) + ", " +
               std::to_string(begin + count) + ") out of " +
               shape_string(t.value()));
    }
    const Index r = t.rows(), c = t.cols();
    return record(OpKind::kSliceRows, {t}, t.value().middleRows(begin, count),
                  [r, c, begin, count](const Matrix& g, Grads& grads) {
                    Matrix full = Matrix::Zero(r, c);
                    full.middleRows(begin, count) = g;
                    grads.add(0, full);
                  });
  }

  Tensor concat_rows(std::span<const Tensor> parts) {
    if (parts.empty()) fail(ErrorKind::kDimension, "concat_rows of nothing");
    const Index c = parts.front().cols();
    Index total = 0;
    std::vector<Index> sizes;
    for (const auto& p : parts) {
      if (p.cols() != c) {
        fail(ErrorKind::kDimension,
             "concat_rows column mismatch: " + shape_string(p.value()) +
                 " vs width " + std::to_string(c));
      }
      sizes.push_back(p.rows());
      total += p.rows();
    }
    Matrix out(total, c);
    Index off = 0;
    for (const auto& p : parts) {
      out.middleRows(off, p.rows()) = p.value();
      off += p.rows();
    }
    return record(OpKind::kConcatRows,
                  std::vector<Tensor>(parts.begin(), parts.end()),
                  std::move(out), [sizes](const Matrix& g, Grads& grads) {
                    Index o = 0;
                    for (std::size_t k = 0; k < sizes.size(); ++k) {
                      if (grads.wants(k)) {
                        grads.add(k, g.middleRows(o, sizes[k]));
                      }
                      o += sizes[k];
                    }
                  });
  }

  /// Square n x n -> n x 1 column of the diagonal.
  Tensor diagonal(const Tensor& t) {
    if (t.rows() != t.cols()) {
      fail(ErrorKind::kDimension,
           "diagonal needs a square matrix, got " + shape_string(t.value()));
    }
    const Index n = t.rows();
    return record(OpKind::kDiagonal, {t}, t.value().diagonal(),
                  [n](const Matrix& g, Grads& grads) {
                    Matrix full = Matrix::Zero(n, n);
                    for (Index i = 0; i < n; ++i) full(i, i) = g(i, 0);
                    grads.add(0, full);
                  });
  }

  /// Block-diagonal constant operator applied to stacked rows: block j maps
  /// rows [o_j, o_j + n_j) where n_j = blocks[j].rows().
  Tensor block_diag_matmul(std::span<const Matrix> blocks, const Tensor& x) {
    Index total = 0;
    for (const auto& b : blocks) {
      if (b.rows() != b.cols()) {
        fail(ErrorKind::kDimension,
             "block_diag_matmul block must be square, got " + shape_string(b));
      }
      total += b.rows();
    }
    if (total != x.rows()) {
      fail(ErrorKind::kDimension,
           "block_diag_matmul blocks cover " + std::to_string(total) +
               " rows but input is " + shape_string(x.value()));
    }
    Matrix out(x.rows(), x.cols());
    Index off = 0;
    for (const auto& b : blocks) {
      out.middleRows(off, b.rows()).noalias() =
          b * x.value().middleRows(off, b.rows());
      off += b.rows();
    }
    std::vector<Matrix> saved(blocks.begin(), blocks.end());
    return record(OpKind::kBlockDiagMatmul, {x}, std::move(out),
                  [saved = std::move(saved)](const Matrix& g, Grads& grads) {
                    Matrix gx(g.rows(), g.cols());
                    Index o = 0;
                    for (const auto& b : saved) {
                      gx.middleRows(o, b.rows()).noalias() =
                          b.transpose() * g.middleRows(o, b.rows());
                      o += b.rows();
                    }
                    grads.add(0, gx);
                  });
  }

  /// Mean of consecutive row segments; output has one row per segment.
  Tensor segment_mean(const Tensor& x, std::span<const Index> sizes) {
    Index total = 0;
    for (Index s : sizes) {
      if (s <= 0) fail(ErrorKind::kEmptyReduction, "segment_mean: empty segment");
      total += s;
    }
    if (total != x.rows()) {
      fail(ErrorKind::kDimension,
           "segment_mean segments cover " + std::to_string(total) +
               " rows but input is " + shape_string(x.value()));
    }
    Matrix out(static_cast<Index>(sizes.size()), x.cols());
    Index off = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      out.row(static_cast<Index>(j)) =
          x.value().middleRows(off, sizes[j]).colwise().sum() /
          static_cast<double>(sizes[j]);
      off += sizes[j];
    }
    std::vector<Index> sz(sizes.begin(), sizes.end());
    const Index r = x.rows();
    return record(OpKind::kSegmentMean, {x}, std::move(out),
                  [sz, r](const Matrix& g, Grads& grads) {
                    Matrix gx(r, g.cols());
                    Index o = 0;
                    for (std::size_t j = 0; j < sz.size(); ++j) {
                      const double inv = 1.0 / static_cast<double>(sz[j]);
                      for (Index i = 0; i < sz[j]; ++i) {
                        gx.row(o + i) = g.row(static_cast<Index>(j)) * inv;
                      }
                      o += sz[j];
                    }
                    grads.add(0, gx);
                  });
  }

  // ---- hyperboloid (curvature -1, anchored at the origin) ---------------

  /// Rows u (spatial tangent coordinates at o) -> points exp_o([0, u]).
  /// The time coordinate is recomputed as sqrt(1 + |spatial|^2), which is
  /// cosh|u| in exact arithmetic and keeps every row on the hyperboloid.
  Tensor exp_origin(const Tensor& u) {
    const Matrix& uv = u.value();
    const Index n = uv.rows(), d = uv.cols();
    Matrix out(n, d + 1);
    Matrix scale_f(n, 1), slope(n, 1);
    for (Index i = 0; i < n; ++i) {
      const double r = uv.row(i).norm();
      double f, fp_over_r;
      if (r < kSeriesThreshold) {
        const double r2 = r * r;
        f = 1.0 + r2 / 6.0;
        fp_over_r = 1.0 / 3.0 + r2 / 30.0;
      } else {
        const double sh = std::sinh(r);
        f = sh / r;
        fp_over_r = (r * std::cosh(r) - sh) / (r * r * r);
      }
      scale_f(i, 0) = f;
      slope(i, 0) = fp_over_r;
      out.row(i).tail(d) = uv.row(i) * f;
      out(i, 0) = std::sqrt(1.0 + out.row(i).tail(d).squaredNorm());
    }
    Matrix saved_u = uv, saved_out = out;
    return record(
        OpKind::kExpOrigin, {u}, std::move(out),
        [saved_u, saved_out, scale_f, slope](const Matrix& g, Grads& grads) {
          const Index rows = saved_u.rows(), dim = saved_u.cols();
          Matrix gu(rows, dim);
          for (Index i = 0; i < rows; ++i) {
            Eigen::RowVectorXd gys =
                g.row(i).tail(dim) +
                g(i, 0) * saved_out.row(i).tail(dim) / saved_out(i, 0);
            const double dot = saved_u.row(i).dot(gys);
            gu.row(i) = scale_f(i, 0) * gys + slope(i, 0) * dot * saved_u.row(i);
          }
          grads.add(0, gu);
        });
  }

  /// Rows y on the hyperboloid -> spatial tangent coordinates of log_o(y).
  /// On the manifold arcosh(y0) == asinh(|y_spatial|); the asinh form only
  /// reads the spatial part and stays well-conditioned near the origin.
  Tensor log_origin(const Tensor& y) {
    const Matrix& yv = y.value();
    if (yv.cols() < 2) {
      fail(ErrorKind::kDimension,
           "log_origin needs at least 2 columns, got " + shape_string(yv));
    }
    const Index n = yv.rows(), d = yv.cols() - 1;
    Matrix out(n, d), scale_g(n, 1), slope(n, 1);
    for (Index i = 0; i < n; ++i) {
      const double s = yv.row(i).tail(d).norm();
      double gs, gp_over_s;
      if (s < kSeriesThreshold) {
        const double s2 = s * s;
        gs = 1.0 - s2 / 6.0;
        gp_over_s = -1.0 / 3.0 + 0.3 * s2;
      } else {
        const double as = std::asinh(s);
        gs = as / s;
        gp_over_s = (s / std::sqrt(1.0 + s * s) - as) / (s * s * s);
      }
      scale_g(i, 0) = gs;
      slope(i, 0) = gp_over_s;
      out.row(i) = yv.row(i).tail(d) * gs;
    }
    Matrix saved_y = yv;
    return record(OpKind::kLogOrigin, {y}, std::move(out),
                  [saved_y, scale_g, slope](const Matrix& g, Grads& grads) {
                    const Index rows = saved_y.rows();
                    const Index dim = saved_y.cols() - 1;
                    Matrix gy = Matrix::Zero(rows, dim + 1);
                    for (Index i = 0; i < rows; ++i) {
                      auto ys = saved_y.row(i).tail(dim);
                      const double dot = ys.dot(g.row(i));
                      gy.row(i).tail(dim) =
                          scale_g(i, 0) * g.row(i) + slope(i, 0) * dot * ys;
                    }
                    grads.add(0, gy);
                  });
  }

  /// Pairwise Lorentzian distances arcosh(-<x_i, y_j>_L) with the argument
  /// clamped to [1, kAcoshMax]. Clamped entries have zero gradient; near 1
  /// the derivative 1/sqrt(z^2 - 1) is evaluated with its radicand floored
  /// at kAcoshGradFloor.
  Tensor lorentz_dist(const Tensor& x, const Tensor& y) {
    if (x.cols() != y.cols() || x.cols() < 2) {
      fail(ErrorKind::kDimension, "lorentz_dist shape mismatch: " +
                                      shape_string(x.value()) + " vs " +
                                      shape_string(y.value()));
    }
    Matrix xj = x.value();
    xj.col(0) *= -1.0;
    Matrix z = -(xj * y.value().transpose());
    Matrix out(z.rows(), z.cols()), dz(z.rows(), z.cols());
    for (Index i = 0; i < z.rows(); ++i) {
      for (Index j = 0; j < z.cols(); ++j) {
        const double v = z(i, j);
        if (std::isnan(v)) {
          // NaN must reach the loss so divergence is detected, not clamped away.
          out(i, j) = v;
          dz(i, j) = v;
        } else if (v <= 1.0) {
          out(i, j) = 0.0;
          dz(i, j) = 0.0;
          mix_branch(0);
        } else if (v >= kAcoshMax) {
          out(i, j) = std::acosh(kAcoshMax);
          dz(i, j) = 0.0;
          mix_branch(3);
        } else {
          out(i, j) = std::acosh(v);
          const double rad = v * v - 1.0;
          mix_branch(rad < kAcoshGradFloor ? 1 : 2);
          dz(i, j) = 1.0 / std::sqrt(std::max(rad, kAcoshGradFloor));
        }
      }
    }
    // dz/dx_i = (y_j0, -y_js) = -J y_j; likewise for y.
    Matrix yj = -y.value();
    yj.col(0) *= -1.0;
    Matrix xjn = -x.value();
    xjn.col(0) *= -1.0;
    return record(OpKind::kLorentzDist, {x, y}, std::move(out),
                  [dz, yj, xjn](const Matrix& g, Grads& grads) {
                    Matrix gz = g.cwiseProduct(dz);
                    if (grads.wants(0)) grads.add(0, gz * yj);
                    if (grads.wants(1)) grads.add(1, gz.transpose() * xjn);
                  });
  }

  /// Pairwise Euclidean distances; the gradient at coincident rows is zero.
  Tensor euclidean_dist(const Tensor& x, const Tensor& y) {
    if (x.cols() != y.cols()) {
      fail(ErrorKind::kDimension, "euclidean_dist shape mismatch: " +
                                      shape_string(x.value()) + " vs " +
                                      shape_string(y.value()));
    }
    const Matrix& xv = x.value();
    const Matrix& yv = y.value();
    Matrix out(xv.rows(), yv.rows());
    for (Index i = 0; i < xv.rows(); ++i) {
      for (Index j = 0; j < yv.rows(); ++j) {
        out(i, j) = (xv.row(i) - yv.row(j)).norm();
        mix_branch(out(i, j) > 0.0);
      }
    }
    Matrix sx = xv, sy = yv, sd = out;
    return record(OpKind::kEuclideanDist, {x, y}, std::move(out),
                  [sx, sy, sd](const Matrix& g, Grads& grads) {
                    Matrix gx = Matrix::Zero(sx.rows(), sx.cols());
                    Matrix gy = Matrix::Zero(sy.rows(), sy.cols());
                    for (Index i = 0; i < sx.rows(); ++i) {
                      for (Index j = 0; j < sy.rows(); ++j) {
                        if (sd(i, j) <= 0.0) continue;
                        Eigen::RowVectorXd dir =
                            (sx.row(i) - sy.row(j)) * (g(i, j) / sd(i, j));
                        gx.row(i) += dir;
                        gy.row(j) -= dir;
                      }
                    }
                    grads.add(0, gx);
                    grads.add(1, gy);
                  });
  }

  // ---- backward ----------------------------------------------------------

  void backward(const Tensor& loss) {
    if (loss.rows() != 1 || loss.cols() != 1) {
      fail(ErrorKind::kRank, "backward needs a scalar (1x1) loss, got " +
                                 shape_string(loss.value()));
    }
    if (!loss.requires_grad()) return;
    for (auto& e : entries_) e.output.state_->grad.setZero();
    loss.state_->grad(0, 0) += 1.0;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
      Grads grads{&it->inputs};
      if (fault_enabled_ && it->kind == fault_kind_) {
        it->backward(it->output.grad() * fault_factor_, grads);
      } else {
        it->backward(it->output.grad(), grads);
      }
    }
  }

 private:
  /// Accumulator handed to backward closures; ignores inputs that do not
  /// require gradients.
  class Grads {
   public:
    explicit Grads(std::vector<Tensor>* inputs) : inputs_(inputs) {}
    bool wants(std::size_t k) const { return (*inputs_)[k].requires_grad(); }
    template <typename Expr>
    void add(std::size_t k, const Expr& g) {
      if (wants(k)) (*inputs_)[k].state_->grad += g;
    }

   private:
    std::vector<Tensor>* inputs_;
  };

  using BackwardFn = std::function<void(const Matrix&, Grads&)>;

  struct Entry {
    OpKind kind;
    std::vector<Tensor> inputs;
    Tensor output;
    BackwardFn backward;
  };

  static void require_same_shape(const Tensor& a, const Tensor& b,
                                 std::string_view op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
      fail(ErrorKind::kDimension, std::string(op) + " shape mismatch: " +
                                      shape_string(a.value()) + " vs " +
                                      shape_string(b.value()));
    }
  }

  void mix_branch(std::uint64_t v) {
    branch_hash_ ^= v + 0x9e3779b97f4a7c15ULL + (branch_hash_ << 6) +
                    (branch_hash_ >> 2);
  }

  Tensor record(OpKind kind, std::vector<Tensor> inputs, Matrix value,
                BackwardFn backward) {
    bool needs_grad = false;
    for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
    Tensor out = Tensor::make(std::move(value), needs_grad);
    if (!needs_grad) return out;
    out.state_->op_index = static_cast<std::int64_t>(entries_.size());
    entries_.push_back(
        Entry{kind, std::move(inputs), out, std::move(backward)});
    return out;
  }

  std::vector<Entry> entries_;
  std::uint64_t branch_hash_ = 0;
  bool fault_enabled_ = false;
  OpKind fault_kind_ = OpKind::kMatmul;
  double fault_factor_ = 1.0;
};

}  // namespace hcglad
