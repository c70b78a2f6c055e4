#pragma once

#include <doctest.h>

#include "dynsparse/linops.hpp"

namespace testing {

using namespace dynsparse;

inline double rel_err(const Vec& a, const Vec& b) {
  const double d = b.norm();
  return (a - b).norm() / (d > 0 ? d : 1.0);
}

inline double rel_err(const Mat& a, const Mat& b) {
  const double d = b.norm();
  return (a - b).norm() / (d > 0 ? d : 1.0);
}

/// Explicit Kronecker product built entry by entry.
inline Mat dense_kron(const Mat& left, const Mat& right) {
  Mat out(left.rows() * right.rows(), left.cols() * right.cols());
  for (Index i = 0; i < left.rows(); ++i)
    for (Index j = 0; j < left.cols(); ++j)
      out.block(i * right.rows(), j * right.cols(), right.rows(), right.cols()) = left(i, j) * right;
  return out;
}

/// Wraps a map and counts how often each direction is applied.
class CountingMap final : public LinearMap {
public:
  explicit CountingMap(MapPtr inner) : LinearMap(inner->shape()), inner_(std::move(inner)) {}
  mutable int forward_calls = 0;
  mutable int adjoint_calls = 0;

protected:
  void apply_into(const Vec& x, Vec& out) const override {
    ++forward_calls;
    out = inner_->apply(x);
  }
  void adjoint_into(const Vec& y, Vec& out) const override {
    ++adjoint_calls;
    out = inner_->adjoint_apply(y);
  }

private:
  MapPtr inner_;
};

}  // namespace testing
