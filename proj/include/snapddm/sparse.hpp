// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SNAPDDM_SPARSE_HPP
#define SNAPDDM_SPARSE_HPP

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <memory>
#include <vector>

#include "snapddm/core.hpp"

namespace snapddm {

using SparseMatrixC = Eigen::SparseMatrix<cdouble, Eigen::RowMajor>;
using VectorC = Eigen::VectorX<cdouble>;

// Direct complex LU factorization (UMFPACK). Factor once, back-substitute many
// times; solves on a factored object are const and safe to run concurrently.
// The CSC copy stays alive with the factorization: UMFPACK's solve re-reads
// the matrix arrays (Eigen's wrapper only keeps a reference).
class DirectSolver {
 public:
  void factor(const SparseMatrixC& a_rowmajor) {
    csc_ = a_rowmajor;
    lu_.compute(csc_);
    if (lu_.info() != Eigen::Success)
      throw Error("sparse factorization failed: resonant/ill-posed system (umfpack status " +
                  std::to_string(int(lu_.info())) + ", n=" + std::to_string(csc_.rows()) + ")");
    n_ = int(csc_.rows());
  }

  VectorC solve(const VectorC& rhs) const {
    require(n_ > 0, "DirectSolver: not factored");
    VectorC x = lu_.solve(rhs);
    require(lu_.info() == Eigen::Success, "sparse back-substitution failed");
    return x;
  }

  int dimension() const { return n_; }

 private:
  Eigen::SparseMatrix<cdouble> csc_;
  Eigen::UmfPackLU<Eigen::SparseMatrix<cdouble>> lu_;
  int n_ = 0;
};

inline double rel_l1_residual(const SparseMatrixC& a, const VectorC& x, const VectorC& b) {
  VectorC r = a * x - b;
  double rb = b.cwiseAbs().sum();
  require(rb > 0.0, "residual check: zero rhs");
  return r.cwiseAbs().sum() / rb;
}

}  // namespace snapddm

#endif  // SNAPDDM_SPARSE_HPP
