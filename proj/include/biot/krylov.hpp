#pragma once

#include <span>
#include <utility>
#include <vector>

#include "biot/preconditioner.hpp"
#include "biot/sparse_matrix.hpp"

namespace biot {

enum class KrylovMode {
    ToTolerance,      // stop once the true relative residual reaches tol
    FixedIterations,  // exactly n_iter preconditioned iterations from the given start
};

enum class KrylovMethod {
    Gmres,
    Richardson,  // x <- x + P^{-1}(b - A x)
};

struct KrylovConfig {
    KrylovMethod method = KrylovMethod::Gmres;
    KrylovMode mode = KrylovMode::ToTolerance;
    int restart = 30;
    double tol = 1e-7;
    int max_iters = 1000;
    int n_iter = 1;
    /// Keep the preconditioned residual estimate of every iteration in the report.
    bool record_history = false;

    static KrylovConfig to_tolerance(double tol, int max_iters = 1000, int restart = 30);
    static KrylovConfig fixed(int n_iter, int restart = 30);

    /// Throws std::invalid_argument when restart < 1, tol <= 0 or n_iter < 1.
    void validate() const;
};

struct SolveReport {
    int iterations_used = 0;
    /// ||b - A x|| / ||b|| (absolute residual when b = 0).
    double final_relative_residual = 0.0;
    bool converged = false;
    /// Preconditioned residual norm after each iteration, when requested.
    std::vector<double> preconditioned_residuals;
    /// Iteration index at which each restart cycle began.
    std::vector<int> cycle_starts;
};

/// Scratch space reused across calls so repeated solves do not reallocate.
class GmresWorkspace {
public:
    std::vector<Vector> basis;
    std::vector<Vector> op_basis;
    Vector r, z, w;

    void ensure(int n, int vectors);
};

/**
 * Restarted GMRES with left preconditioning. `x` holds the initial guess on
 * entry and the iterate on exit. The residual used for stopping and
 * reporting is always the unpreconditioned one.
 */
SolveReport gmres(const SparseMatrix& op, const Preconditioner& precond, std::span<const double> b,
                  std::span<double> x, const KrylovConfig& cfg, GmresWorkspace* workspace = nullptr);

/// Copying form: returns the iterate started from x0.
std::pair<Vector, SolveReport> gmres_solve(const SparseMatrix& op, const Preconditioner& precond,
                                           std::span<const double> b, std::span<const double> x0,
                                           const KrylovConfig& cfg);

/// True relative residual ||b - A x|| / ||b||.
double relative_residual(const SparseMatrix& op, std::span<const double> b, std::span<const double> x);

}  // namespace biot
