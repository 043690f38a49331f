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

// Hyperboloid model of hyperbolic space with curvature -1:
//   H^d = { x in R^{d+1} : <x, x>_L = -1, x_0 > 0 },
//   <x, y>_L = -x_0 y_0 + sum_i x_i y_i.
// Value-level geometry used by tests, diagnostics and the CLI; the
// differentiable origin-anchored maps live on the Tape.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "hcglad/error.hpp"

namespace hcglad::lorentz {

using Vector = Eigen::VectorXd;

inline constexpr double kSmallNorm = 1e-9;
inline constexpr double kAcoshMax = 1e15;
inline constexpr double kNegativeNormSlack = 1e-12;

inline double inner(const Vector& x, const Vector& y) {
  if (x.size() != y.size() || x.size() < 1) {
    fail(ErrorKind::kDimension,
         "lorentz inner: dimension mismatch " + std::to_string(x.size()) +
             " vs " + std::to_string(y.size()));
  }
  return -x(0) * y(0) + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

/// |<x,x>_L + 1|; zero exactly on the hyperboloid.
inline double constraint_violation(const Vector& x) {
  return std::abs(inner(x, x) + 1.0);
}

/// A point of H^d. Construct through `from_coords` (validated) or
/// `project_to_hyperboloid` (always valid).
class LorentzPoint {
 public:
  static constexpr double kTolerance = 1e-6;

  static LorentzPoint origin(Eigen::Index d) {
    Vector v = Vector::Zero(d + 1);
    v(0) = 1.0;
    return LorentzPoint(std::move(v));
  }

  static LorentzPoint from_coords(Vector coords) {
    if (coords.size() < 2) {
      fail(ErrorKind::kDimension, "lorentz point needs at least 2 coordinates");
    }
    const double scale = std::max(1.0, coords(0) * coords(0));
    if (!(coords(0) > 0.0) ||
        !(constraint_violation(coords) <= kTolerance * scale)) {
      fail(ErrorKind::kManifold,
           "point is off the hyperboloid: <x,x>_L = " +
               std::to_string(inner(coords, coords)) +
               ", x0 = " + std::to_string(coords(0)));
    }
    return LorentzPoint(std::move(coords));
  }

  /// Trusted construction for values produced by manifold-closed code.
  static LorentzPoint unchecked(Vector coords) {
    return LorentzPoint(std::move(coords));
  }

  const Vector& coords() const { return coords_; }
  Eigen::Index dim() const { return coords_.size() - 1; }
  double operator[](Eigen::Index i) const { return coords_(i); }

 private:
  explicit LorentzPoint(Vector v) : coords_(std::move(v)) {}
  Vector coords_;
};

/// A vector of the tangent space at `base`: <base, v>_L = 0.
class TangentVector {
 public:
  static constexpr double kTolerance = 1e-6;

  static TangentVector zero(const LorentzPoint& base) {
    return TangentVector(base, Vector::Zero(base.coords().size()));
  }

  static TangentVector at(const LorentzPoint& base, Vector coords) {
    if (coords.size() != base.coords().size()) {
      fail(ErrorKind::kDimension, "tangent vector dimension mismatch");
    }
    const double scale =
        std::max(1.0, base.coords().norm() * coords.norm());
    if (!(std::abs(inner(base.coords(), coords)) <= kTolerance * scale)) {
      fail(ErrorKind::kTangent,
           "vector is not tangent at its base: <x,v>_L = " +
               std::to_string(inner(base.coords(), coords)));
    }
    return TangentVector(base, std::move(coords));
  }

  /// The tangent vector [0, u] at the origin.
  static TangentVector at_origin(const Vector& spatial) {
    Vector v(spatial.size() + 1);
    v(0) = 0.0;
    v.tail(spatial.size()) = spatial;
    return TangentVector(LorentzPoint::origin(spatial.size()), std::move(v));
  }

  static TangentVector unchecked(const LorentzPoint& base, Vector coords) {
    return TangentVector(base, std::move(coords));
  }

  const LorentzPoint& base() const { return base_; }
  const Vector& coords() const { return coords_; }

 private:
  TangentVector(LorentzPoint base, Vector v)
      : base_(std::move(base)), coords_(std::move(v)) {}
  LorentzPoint base_;
  Vector coords_;
};

/// x_0 recomputed as sqrt(1 + |spatial|^2); spatial part unchanged.
inline LorentzPoint project_to_hyperboloid(const Vector& raw) {
  if (raw.size() < 2) {
    fail(ErrorKind::kDimension, "projection needs at least 2 coordinates");
  }
  Vector v = raw;
  v(0) = std::sqrt(1.0 + raw.tail(raw.size() - 1).squaredNorm());
  return LorentzPoint::unchecked(std::move(v));
}

inline double dist(const LorentzPoint& x, const LorentzPoint& y) {
  const double z = std::clamp(-inner(x.coords(), y.coords()), 1.0, kAcoshMax);
  return std::acosh(z);
}

/// Lorentzian norm of a tangent vector. Negative square norms within
/// kNegativeNormSlack are numerical noise and clamp to 0.
inline double tangent_norm(const TangentVector& v) {
  const double sq = inner(v.coords(), v.coords());
  if (sq < -kNegativeNormSlack) {
    fail(ErrorKind::kTangent, "tangent vector has negative square norm " +
                                  std::to_string(sq));
  }
  return std::sqrt(std::max(sq, 0.0));
}

inline LorentzPoint exp_map(const TangentVector& v) {
  const Vector& x = v.base().coords();
  const double norm = tangent_norm(v);
  if (norm < kSmallNorm) return project_to_hyperboloid(x + v.coords());
  Vector out = std::cosh(norm) * x + std::sinh(norm) * (v.coords() / norm);
  return project_to_hyperboloid(out);
}

inline TangentVector log_map(const LorentzPoint& x, const LorentzPoint& y) {
  const Vector& xc = x.coords();
  const double xy = inner(xc, y.coords());
  Vector u = y.coords() + xy * xc;
  // Remove any component along x left by rounding so the result is tangent.
  u += inner(xc, u) * xc;
  const double sq = inner(u, u);
  const double norm = std::sqrt(std::max(sq, 0.0));
  const double d = dist(x, y);
  if (norm < kSmallNorm || d == 0.0) return TangentVector::zero(x);
  return TangentVector::unchecked(x, u * (d / norm));
}

/// exp_o([0, x]) = (cosh|x|, sinh|x| x/|x|); lift(0) = o.
inline LorentzPoint lift(const Vector& x) {
  const double r = x.norm();
  Vector out(x.size() + 1);
  if (r < kSmallNorm) {
    out(0) = 1.0;
    out.tail(x.size()) = x;
    return project_to_hyperboloid(out);
  }
  out(0) = std::cosh(r);
  out.tail(x.size()) = (std::sinh(r) / r) * x;
  return LorentzPoint::unchecked(std::move(out));
}

inline LorentzPoint exp_origin(const Vector& spatial) { return lift(spatial); }

/// Spatial coordinates of log_o(y).
inline Vector log_origin(const LorentzPoint& y) {
  const Eigen::Index d = y.dim();
  const Vector s = y.coords().tail(d);
  const double n = s.norm();
  if (n < kSmallNorm) return s;
  return s * (std::asinh(n) / n);
}

}  // namespace hcglad::lorentz
