#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <vector>

// Closed-form Euclidean projections and related prox maps. All functions take
// any dense Eigen expression and return a concrete column vector of the same
// scalar type.

namespace onebit {

template <typename Derived>
using PlainVector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
auto soft_threshold(Eigen::MatrixBase<Derived> const &v, typename Derived::Scalar lambda) -> PlainVector<Derived>
{
  using Scalar = typename Derived::Scalar;
  return v.unaryExpr([lambda](Scalar x) {
    Scalar const mag = std::abs(x) - lambda;
    return mag > Scalar(0) ? std::copysign(mag, x) : Scalar(0);
  });
}

template <typename Derived>
auto project_l2_ball(Eigen::MatrixBase<Derived> const &v, typename Derived::Scalar radius) -> PlainVector<Derived>
{
  auto const norm = v.norm();
  if (norm <= radius) { return v; }
  return v * (radius / norm);
}

// Threshold theta such that ||soft_threshold(v, theta)||_1 = radius, for
// ||v||_1 > radius. Sorting-based, O(n log n), exact.
template <typename Derived>
auto l1_ball_threshold(Eigen::MatrixBase<Derived> const &v, typename Derived::Scalar radius) -> typename Derived::Scalar
{
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> mags(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) { mags[i] = std::abs(v[i]); }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  Scalar cumsum = 0;
  Scalar theta = 0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumsum += mags[j];
    Scalar const candidate = (cumsum - radius) / Scalar(j + 1);
    if (mags[j] - candidate > Scalar(0)) { theta = candidate; }
  }
  return std::max(theta, Scalar(0));
}

template <typename Derived>
auto project_l1_ball(Eigen::MatrixBase<Derived> const &v, typename Derived::Scalar radius) -> PlainVector<Derived>
{
  if (v.template lpNorm<1>() <= radius) { return v; }
  return soft_threshold(v, l1_ball_threshold(v, radius));
}

} // namespace onebit
