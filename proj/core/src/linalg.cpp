// -*-c++-*----------------------------------------------------------------------------------------
// Copyright 2026 The pcaflow Authors
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

#include "pcaflow/linalg.hpp"

#include <algorithm>
#include <numbers>
#include <utility>

#include "pcaflow/errors.hpp"

namespace pcaflow
{
namespace
{
// Relative gap between the two smallest eigenvalues under which the
// cross-product eigenvector is abandoned for Jacobi.
constexpr double kJacobiGap = 1e-6;
// Relative gap under which the smallest eigenvalue counts as repeated.
constexpr double kDegenerateGap = 1e-9;
// Minimum squared norm of the best adjugate column (matrix scaled to unit
// max entry) for the cross-product eigenvector to be trusted.
constexpr double kMinCrossNorm2 = 1e-24;

void orient(Vec3 & v)
{
  if (v.z < 0.0) {
    v = -v;
  }
}

// Column of adj(B - mu I) with the largest norm. Up to scale this is the
// eigenvector of the eigenvalue closest to mu.
Vec3 best_adjugate_column(const SymMatrix3 & b, double mu, double & norm2)
{
  const Vec3 r0{b.a00 - mu, b.a01, b.a02};
  const Vec3 r1{b.a01, b.a11 - mu, b.a12};
  const Vec3 r2{b.a02, b.a12, b.a22 - mu};
  const Vec3 c01 = r0.cross(r1);
  const Vec3 c02 = r0.cross(r2);
  const Vec3 c12 = r1.cross(r2);
  const double n01 = c01.squared_norm();
  const double n02 = c02.squared_norm();
  const double n12 = c12.squared_norm();
  if (n01 >= n02 && n01 >= n12) {
    norm2 = n01;
    return c01;
  }
  if (n02 >= n12) {
    norm2 = n02;
    return c02;
  }
  norm2 = n12;
  return c12;
}

SymMatrix3 scaled(const SymMatrix3 & m, double s)
{
  return {m.a00 * s, m.a01 * s, m.a02 * s, m.a11 * s, m.a12 * s, m.a22 * s};
}

}  // namespace

double SymMatrix3::max_abs() const
{
  return std::max(
    {std::abs(a00), std::abs(a01), std::abs(a02), std::abs(a11), std::abs(a12), std::abs(a22)});
}

bool SymMatrix3::all_finite() const
{
  return std::isfinite(a00) && std::isfinite(a01) && std::isfinite(a02) && std::isfinite(a11) &&
         std::isfinite(a12) && std::isfinite(a22);
}

SmallestEigenpair jacobi_smallest_eigenpair(const SymMatrix3 & m)
{
  if (!m.all_finite()) {
    throw NumericError("non-finite entry in covariance matrix");
  }
  double a[3][3] = {{m.a00, m.a01, m.a02}, {m.a01, m.a11, m.a12}, {m.a02, m.a12, m.a22}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    const double diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
    if (off == 0.0 || off <= 1e-34 * diag) {
      break;
    }
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) {
          continue;
        }
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with the rotation in the (p, q) plane.
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });

  SmallestEigenpair out;
  out.used_jacobi = true;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = a[order[i]][order[i]];
  }
  const int s = order[2];
  out.vector = Vec3{v[0][s], v[1][s], v[2][s]}.normalized();
  orient(out.vector);
  const double span = std::max(std::abs(out.values[0]), std::abs(out.values[2]));
  out.degenerate = span == 0.0 || (out.values[1] - out.values[2]) <= kDegenerateGap * span;
  return out;
}

SmallestEigenpair smallest_eigenpair(const SymMatrix3 & m)
{
  if (!m.all_finite()) {
    throw NumericError("non-finite entry in covariance matrix");
  }
  const double scale = m.max_abs();
  if (scale == 0.0) {
    return {{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, true, false};
  }
  const SymMatrix3 b = scaled(m, 1.0 / scale);

  const double q = b.trace() / 3.0;
  const double p1 = b.a01 * b.a01 + b.a02 * b.a02 + b.a12 * b.a12;
  const double d0 = b.a00 - q;
  const double d1 = b.a11 - q;
  const double d2 = b.a22 - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  if (p2 <= 1e-30) {
    // Multiple of the identity: every direction is an eigenvector.
    return {{m.a00, m.a00, m.a00}, {0.0, 0.0, 1.0}, true, false};
  }
  const double p = std::sqrt(p2 / 6.0);
  const SymMatrix3 c{d0 / p, b.a01 / p, b.a02 / p, d1 / p, b.a12 / p, d2 / p};
  const double r = std::clamp(c.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;

  const double span = std::max(std::abs(e1), std::abs(e3));
  if (e2 - e3 < kJacobiGap * span) {
    return jacobi_smallest_eigenpair(m);
  }

  // Two rounds of adjugate / Rayleigh-quotient refinement recover full
  // precision when the trigonometric root is only accurate to sqrt(eps).
  Vec3 v;
  for (int round = 0; round < 2; ++round) {
    double norm2 = 0.0;
    const Vec3 col = best_adjugate_column(b, e3, norm2);
    if (!(norm2 > kMinCrossNorm2)) {
      return jacobi_smallest_eigenpair(m);
    }
    v = col * (1.0 / std::sqrt(norm2));
    e3 = v.dot(b * v);
  }
  orient(v);

  SmallestEigenpair out;
  out.values = {e1 * scale, (3.0 * q - e1 - e3) * scale, e3 * scale};
  out.vector = v;
  out.degenerate = false;
  return out;
}

}  // namespace pcaflow
