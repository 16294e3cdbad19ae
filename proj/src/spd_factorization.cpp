#include "biot/spd_factorization.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace biot {

namespace {

using EigenCsr = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using EigenCsc = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Ldlt = Eigen::SimplicialLDLT<EigenCsc, Eigen::Lower, Eigen::AMDOrdering<int>>;

std::string pivot_message(int index, double pivot) {
    std::ostringstream os;
    os << "matrix is not positive definite: pivot " << pivot << " at index " << index;
    return os.str();
}

}  // namespace

NotSpdError::NotSpdError(int index, double pivot)
    : std::runtime_error(pivot_message(index, pivot)), index_(index), pivot_(pivot) {}

CgBreakdown::CgBreakdown(int iteration, double curvature)
    : std::runtime_error("cg_solve: non-positive curvature " + std::to_string(curvature) + " at iteration " +
                         std::to_string(iteration) + " (matrix not SPD)"),
      iteration_(iteration) {}

struct SpdFactorization::Impl {
    Ldlt ldlt;
};

SpdFactorization factor_spd(const SparseMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("factor_spd: matrix is not square");
    const double scale = std::max(m.max_abs(), 1e-300);
    if (m.max_asymmetry() > 1e-12 * scale) {
        throw std::invalid_argument("factor_spd: matrix is not symmetric (max asymmetry " +
                                    std::to_string(m.max_asymmetry()) + ")");
    }

    SpdFactorization f;
    f.n_ = m.rows();
    auto impl = std::make_shared<SpdFactorization::Impl>();
    if (m.rows() > 0) {
        const Eigen::Map<const EigenCsr> csr(m.rows(), m.cols(), m.nnz(), m.row_offsets().data(),
                                             m.col_indices().data(), m.values().data());
        const EigenCsc csc = csr;
        impl->ldlt.compute(csc);

        const auto d = impl->ldlt.vectorD();
        const auto& pinv = impl->ldlt.permutationPinv().indices();
        for (Eigen::Index k = 0; k < d.size(); ++k) {
            if (!(d[k] > 0.0)) throw NotSpdError(pinv[k], d[k]);
        }
        if (impl->ldlt.info() != Eigen::Success) throw NotSpdError(-1, 0.0);
    }
    f.impl_ = std::move(impl);
    return f;
}

std::vector<int> SpdFactorization::permutation() const {
    std::vector<int> out(n_);
    if (!impl_ || n_ == 0) return out;
    const auto& pinv = impl_->ldlt.permutationPinv().indices();
    for (int k = 0; k < n_; ++k) out[k] = pinv[k];
    return out;
}

long SpdFactorization::factor_nnz() const {
    if (!impl_ || n_ == 0) return 0;
    return static_cast<long>(impl_->ldlt.matrixL().nestedExpression().nonZeros()) + n_;
}

Vector SpdFactorization::solve(std::span<const double> rhs) const {
    Vector out(n_);
    solve(rhs, out);
    return out;
}

void SpdFactorization::solve(std::span<const double> rhs, std::span<double> out) const {
    if (static_cast<int>(rhs.size()) != n_ || static_cast<int>(out.size()) != n_) {
        throw std::invalid_argument("SpdFactorization::solve: dimension mismatch");
    }
    if (n_ == 0) return;
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_);
    Eigen::Map<Eigen::VectorXd> x(out.data(), n_);
    x = impl_->ldlt.solve(b);
}

}  // namespace biot
