#include <stdexcept>

#include "biot/spd_factorization.hpp"

namespace biot {

CgResult cg_solve(const SparseMatrix& m, std::span<const double> b, std::span<const double> x0, double tol,
                  int max_it) {
    const int n = m.rows();
    if (m.cols() != n || static_cast<int>(b.size()) != n || static_cast<int>(x0.size()) != n) {
        throw std::invalid_argument("cg_solve: dimension mismatch");
    }
    CgResult res;
    res.x.assign(x0.begin(), x0.end());
    const double bnorm = norm2(b);
    Vector r(n), p(n), q(n);
    m.multiply(res.x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double rr = dot(r, r);
    const double target = tol * (bnorm > 0.0 ? bnorm : 1.0);
    if (std::sqrt(rr) <= target) {
        res.converged = true;
        res.relative_residual = bnorm > 0.0 ? std::sqrt(rr) / bnorm : std::sqrt(rr);
        return res;
    }
    p = r;
    for (int it = 1; it <= max_it; ++it) {
        m.multiply(p, q);
        const double curvature = dot(p, q);
        if (!(curvature > 0.0)) throw CgBreakdown(it, curvature);
        const double alpha = rr / curvature;
        axpy(alpha, p, res.x);
        axpy(-alpha, q, r);
        const double rr_new = dot(r, r);
        res.iterations = it;
        if (std::sqrt(rr_new) <= target) {
            rr = rr_new;
            res.converged = true;
            break;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    res.relative_residual = bnorm > 0.0 ? std::sqrt(rr) / bnorm : std::sqrt(rr);
    return res;
}

}  // namespace biot
