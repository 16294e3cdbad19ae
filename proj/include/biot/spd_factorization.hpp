#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "biot/sparse_matrix.hpp"

namespace biot {

/// Raised when a factorization meets a non-positive pivot.
class NotSpdError : public std::runtime_error {
public:
    NotSpdError(int index, double pivot);
    /// Row/column of the original (unpermuted) matrix where the pivot failed.
    int index() const { return index_; }
    double pivot() const { return pivot_; }

private:
    int index_;
    double pivot_;
};

/**
 * Sparse LDL^T factorization of a symmetric positive-definite matrix with a
 * fill-reducing (AMD) permutation. Immutable and cheap to copy; `solve` is
 * const and allocates its own workspace, so one factorization may be shared
 * by concurrent callers.
 */
class SpdFactorization {
public:
    SpdFactorization() = default;

    int size() const { return n_; }
    bool empty() const { return impl_ == nullptr; }

    /// Fill-reducing permutation: permuted position k holds original row permutation()[k].
    std::vector<int> permutation() const;
    /// Number of stored entries in the triangular factor.
    long factor_nnz() const;

    Vector solve(std::span<const double> rhs) const;
    void solve(std::span<const double> rhs, std::span<double> out) const;

private:
    struct Impl;
    friend SpdFactorization factor_spd(const SparseMatrix& m);

    std::shared_ptr<const Impl> impl_;
    int n_ = 0;
};

/**
 * Factor a symmetric positive-definite matrix. Rejects matrices that are not
 * symmetric to 1e-12 relative (std::invalid_argument) and reports the first
 * non-positive pivot as NotSpdError.
 */
SpdFactorization factor_spd(const SparseMatrix& m);

struct CgResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Raised when conjugate gradients detects a non-positive curvature direction.
class CgBreakdown : public std::runtime_error {
public:
    CgBreakdown(int iteration, double curvature);
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

/// Unpreconditioned conjugate gradients; stops at ||b - Mx|| <= tol ||b|| or after max_it iterations.
CgResult cg_solve(const SparseMatrix& m, std::span<const double> b, std::span<const double> x0, double tol,
                  int max_it);

}  // namespace biot
