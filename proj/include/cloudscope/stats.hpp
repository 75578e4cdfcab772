#pragma once

#include <Eigen/Core>

#include <cmath>

namespace cloudscope {

// Moments over all elements of an array expression. Population convention
// (divide by N) throughout.

template <typename Derived>
typename Derived::Scalar population_mean(const Eigen::ArrayBase<Derived>& a) {
  return a.mean();
}

/// Two-pass variance.
template <typename Derived>
typename Derived::Scalar population_variance(const Eigen::ArrayBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Scalar mean = a.mean();
  return (a - mean).square().mean();
}

template <typename Derived>
typename Derived::Scalar population_stddev(const Eigen::ArrayBase<Derived>& a) {
  return std::sqrt(population_variance(a));
}

/// (a - mean) / stddev. The caller guarantees a nonzero spread.
template <typename Derived>
auto standardized(const Eigen::ArrayBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Scalar mean = a.mean();
  const Scalar sd = std::sqrt((a - mean).square().mean());
  return ((a - mean) / sd).eval();
}

} // namespace cloudscope
