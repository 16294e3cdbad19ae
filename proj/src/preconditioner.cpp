#include "biot/preconditioner.hpp"

#include <algorithm>
#include <stdexcept>

namespace biot {

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
    if (static_cast<int>(r.size()) != n_ || static_cast<int>(z.size()) != n_) {
        throw std::invalid_argument("IdentityPreconditioner::apply: dimension mismatch");
    }
    std::copy(r.begin(), r.end(), z.begin());
}

const char* to_string(PreconditionerKind kind) {
    return kind == PreconditionerKind::LowerTriangular ? "p1" : "p2";
}

BlockPreconditioner BlockPreconditioner::build(PreconditionerKind kind, const BiotSystem& system) {
    return build(kind, system.elasticity_block(), system.coupling_transpose_block(), system.schur_approximation());
}

BlockPreconditioner BlockPreconditioner::build(PreconditionerKind kind, const SparseMatrix& A, const SparseMatrix& Bt,
                                               const SparseMatrix& S) {
    BlockPreconditioner p;
    p.kind_ = kind;
    p.nu_ = A.rows();
    p.np_ = S.rows();
    if (kind == PreconditionerKind::LowerTriangular && (Bt.rows() != p.np_ || Bt.cols() != p.nu_)) {
        throw std::invalid_argument("BlockPreconditioner: B^T block has wrong dimensions");
    }
    p.a_factor_ = factor_spd(A);
    if (kind == PreconditionerKind::LowerTriangular) p.bt_ = Bt;
    p.schur_.S = S;
    p.schur_.factor = factor_spd(S);
    return p;
}

void BlockPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
    if (static_cast<int>(r.size()) != size() || static_cast<int>(z.size()) != size()) {
        throw std::invalid_argument("BlockPreconditioner::apply: dimension mismatch");
    }
    const auto r_u = r.first(nu_);
    const auto r_p = r.subspan(nu_);
    auto z_u = z.first(nu_);
    auto z_p = z.subspan(nu_);

    a_factor_.solve(r_u, z_u);
    Vector rhs_p(np_);
    if (kind_ == PreconditionerKind::LowerTriangular) {
        bt_.multiply(z_u, rhs_p);
        for (int i = 0; i < np_; ++i) rhs_p[i] -= r_p[i];
    } else {
        for (int i = 0; i < np_; ++i) rhs_p[i] = -r_p[i];
    }
    schur_.factor.solve(rhs_p, z_p);
}

}  // namespace biot
