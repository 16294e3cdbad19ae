#include "biot/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biot {

KrylovConfig KrylovConfig::to_tolerance(double tol, int max_iters, int restart) {
    KrylovConfig c;
    c.mode = KrylovMode::ToTolerance;
    c.tol = tol;
    c.max_iters = max_iters;
    c.restart = restart;
    return c;
}

KrylovConfig KrylovConfig::fixed(int n_iter, int restart) {
    KrylovConfig c;
    c.mode = KrylovMode::FixedIterations;
    c.n_iter = n_iter;
    c.restart = restart;
    return c;
}

void KrylovConfig::validate() const {
    if (restart < 1) throw std::invalid_argument("KrylovConfig: restart must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("KrylovConfig: tol must be positive");
    if (mode == KrylovMode::FixedIterations && n_iter < 1) {
        throw std::invalid_argument("KrylovConfig: n_iter must be >= 1");
    }
    if (mode == KrylovMode::ToTolerance && max_iters < 1) {
        throw std::invalid_argument("KrylovConfig: max_iters must be >= 1");
    }
}

void GmresWorkspace::ensure(int n, int vectors) {
    if (static_cast<int>(basis.size()) < vectors) basis.resize(vectors);
    if (static_cast<int>(op_basis.size()) < vectors) op_basis.resize(vectors);
    for (auto& v : basis) v.resize(n);
    for (auto& v : op_basis) v.resize(n);
    r.resize(n);
    z.resize(n);
    w.resize(n);
}

double relative_residual(const SparseMatrix& op, std::span<const double> b, std::span<const double> x) {
    Vector r(b.begin(), b.end());
    op.multiply_add(-1.0, x, r);
    const double bnorm = norm2(b);
    return bnorm > 0.0 ? norm2(r) / bnorm : norm2(r);
}

namespace {

void residual(const SparseMatrix& op, std::span<const double> b, std::span<const double> x, std::span<double> r) {
    op.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

SolveReport richardson(const SparseMatrix& op, const Preconditioner& precond, std::span<const double> b,
                       std::span<double> x, const KrylovConfig& cfg) {
    const bool fixed = cfg.mode == KrylovMode::FixedIterations;
    const int budget = fixed ? cfg.n_iter : cfg.max_iters;
    const double bnorm = norm2(b);
    const double scale = bnorm > 0.0 ? bnorm : 1.0;
    Vector r(x.size()), z(x.size());
    SolveReport report;
    residual(op, b, x, r);
    double rnorm = norm2(r);
    for (int it = 0; it < budget; ++it) {
        if (!fixed && rnorm <= cfg.tol * scale) break;
        precond.apply(r, z);
        axpy(1.0, z, x);
        ++report.iterations_used;
        residual(op, b, x, r);
        rnorm = norm2(r);
        if (cfg.record_history) report.preconditioned_residuals.push_back(norm2(z));
    }
    report.final_relative_residual = rnorm / scale;
    report.converged = rnorm <= cfg.tol * scale;
    return report;
}

/// Back substitution on the leading k x k block of the rotated Hessenberg matrix.
void solve_upper(const std::vector<double>& h, int ld, const std::vector<double>& g, int k, std::vector<double>& y) {
    for (int i = k - 1; i >= 0; --i) {
        double s = g[i];
        for (int j = i + 1; j < k; ++j) s -= h[i * ld + j] * y[j];
        y[i] = s / h[i * ld + i];
    }
}

}  // namespace

SolveReport gmres(const SparseMatrix& op, const Preconditioner& precond, std::span<const double> b,
                  std::span<double> x, const KrylovConfig& cfg, GmresWorkspace* workspace) {
    cfg.validate();
    const int n = op.rows();
    if (op.cols() != n || static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n ||
        precond.size() != n) {
        throw std::invalid_argument("gmres: dimension mismatch");
    }
    if (cfg.method == KrylovMethod::Richardson) return richardson(op, precond, b, x, cfg);

    const bool fixed = cfg.mode == KrylovMode::FixedIterations;
    const int budget = fixed ? cfg.n_iter : cfg.max_iters;
    const int m = std::min(cfg.restart, budget);

    GmresWorkspace local;
    GmresWorkspace& ws = workspace != nullptr ? *workspace : local;
    ws.ensure(n, m + 1);
    auto& V = ws.basis;
    auto& W = ws.op_basis;
    auto& r = ws.r;
    auto& z = ws.z;
    auto& w = ws.w;

    const double bnorm = norm2(b);
    const double scale = bnorm > 0.0 ? bnorm : 1.0;
    const double target = cfg.tol * scale;

    SolveReport report;
    residual(op, b, x, r);
    double rnorm = norm2(r);
    if (!fixed && rnorm <= target) {
        report.converged = true;
        report.final_relative_residual = rnorm / scale;
        return report;
    }

    const int ld = m;  // row stride of the (m+1) x m Hessenberg matrix
    std::vector<double> H((m + 1) * m), cs(m), sn(m), g(m + 1), y(m);
    Vector r_trial(n);
    int it = 0;
    bool finished = false;

    while (it < budget && !finished) {
        precond.apply(r, z);
        const double beta = norm2(z);
        if (beta == 0.0) break;
        report.cycle_starts.push_back(it);
        for (int i = 0; i < n; ++i) V[0][i] = z[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int k = 0;
        bool breakdown = false;
        bool converged_in_cycle = false;
        for (int j = 0; j < m && it < budget; ++j) {
            op.multiply(V[j], W[j]);
            precond.apply(W[j], w);
            const double norm_before = norm2(w);
            for (int i = 0; i <= j; ++i) {
                const double hij = dot(w, V[i]);
                H[i * ld + j] = hij;
                axpy(-hij, V[i], w);
            }
            const double hnext = norm2(w);
            for (int i = 0; i < j; ++i) {
                const double a = H[i * ld + j];
                const double c = H[(i + 1) * ld + j];
                H[i * ld + j] = cs[i] * a + sn[i] * c;
                H[(i + 1) * ld + j] = -sn[i] * a + cs[i] * c;
            }
            const double a = H[j * ld + j];
            const double denom = std::hypot(a, hnext);
            cs[j] = denom > 0.0 ? a / denom : 1.0;
            sn[j] = denom > 0.0 ? hnext / denom : 0.0;
            H[j * ld + j] = denom;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            ++it;
            k = j + 1;
            if (cfg.record_history) report.preconditioned_residuals.push_back(std::abs(g[j + 1]));

            breakdown = hnext <= 1e-14 * norm_before;
            if (!breakdown) {
                for (int i = 0; i < n; ++i) V[j + 1][i] = w[i] / hnext;
            }
            if (!fixed) {
                solve_upper(H, ld, g, k, y);
                std::copy(r.begin(), r.end(), r_trial.begin());
                for (int i = 0; i < k; ++i) axpy(-y[i], W[i], r_trial);
                if (norm2(r_trial) <= target) converged_in_cycle = true;
            }
            if (breakdown || converged_in_cycle) break;
        }

        solve_upper(H, ld, g, k, y);
        for (int i = 0; i < k; ++i) axpy(y[i], V[i], x);
        residual(op, b, x, r);
        rnorm = norm2(r);
        if (!fixed && rnorm <= target) finished = true;
        // A breakdown means the Krylov space is invariant: exact in exact arithmetic. In fixed
        // mode stop there; in tolerance mode restart from the true residual if it is still too large.
        if (breakdown && fixed) finished = true;
    }

    report.iterations_used = it;
    report.final_relative_residual = rnorm / scale;
    report.converged = rnorm <= target;
    return report;
}

std::pair<Vector, SolveReport> gmres_solve(const SparseMatrix& op, const Preconditioner& precond,
                                           std::span<const double> b, std::span<const double> x0,
                                           const KrylovConfig& cfg) {
    Vector x(x0.begin(), x0.end());
    SolveReport report = gmres(op, precond, b, x, cfg, nullptr);
    return {std::move(x), std::move(report)};
}

}  // namespace biot
