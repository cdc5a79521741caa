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

#ifndef PCAFLOW_LINALG_HPP
#define PCAFLOW_LINALG_HPP

#include <array>
#include <cmath>

namespace pcaflow
{
struct Vec3
{
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Vec3 operator+(const Vec3 & o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3 & o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr double dot(const Vec3 & o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3 & o) const
  {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  constexpr double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  Vec3 normalized() const { return *this * (1.0 / norm()); }
};

// Symmetric 3x3 matrix stored as its upper triangle.
struct SymMatrix3
{
  double a00{0.0}, a01{0.0}, a02{0.0};
  double a11{0.0}, a12{0.0};
  double a22{0.0};

  static constexpr SymMatrix3 diagonal(double d0, double d1, double d2)
  {
    return {d0, 0.0, 0.0, d1, 0.0, d2};
  }

  constexpr double operator()(int r, int c) const
  {
    if (r > c) {
      const int tmp = r;
      r = c;
      c = tmp;
    }
    if (r == 0) {
      return c == 0 ? a00 : (c == 1 ? a01 : a02);
    }
    if (r == 1) {
      return c == 1 ? a11 : a12;
    }
    return a22;
  }

  constexpr Vec3 operator*(const Vec3 & v) const
  {
    return {a00 * v.x + a01 * v.y + a02 * v.z, a01 * v.x + a11 * v.y + a12 * v.z,
            a02 * v.x + a12 * v.y + a22 * v.z};
  }

  constexpr double trace() const { return a00 + a11 + a22; }
  constexpr double determinant() const
  {
    return a00 * (a11 * a22 - a12 * a12) - a01 * (a01 * a22 - a12 * a02) +
           a02 * (a01 * a12 - a11 * a02);
  }
  double max_abs() const;
  bool all_finite() const;
};

// Eigenvalues in descending order and the unit eigenvector of the smallest.
struct SmallestEigenpair
{
  std::array<double, 3> values{};
  Vec3 vector{};
  // The smallest eigenvalue is (numerically) repeated so its eigenvector is
  // not unique.
  bool degenerate{false};
  // The cyclic Jacobi path produced the result.
  bool used_jacobi{false};
};

// Closed-form (trigonometric) eigenvalues, Newton-polished smallest root and
// cross-product eigenvector. Falls back to cyclic Jacobi when the two
// smallest eigenvalues nearly coincide. The returned vector is oriented so
// that its last component is non-negative. Throws NumericError on non-finite
// input.
SmallestEigenpair smallest_eigenpair(const SymMatrix3 & m);

// Cyclic Jacobi eigen-decomposition; same contract as smallest_eigenpair.
SmallestEigenpair jacobi_smallest_eigenpair(const SymMatrix3 & m);

}  // namespace pcaflow

#endif  // PCAFLOW_LINALG_HPP
