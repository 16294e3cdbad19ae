#include <gtest/gtest.h>

#include "biot/benchmarks.hpp"
#include "biot/biot_system.hpp"
#include "biot/preconditioner.hpp"
#include "oracles.hpp"

using namespace biot;

namespace {

BiotSystem trig_system(int n) { return BiotSystem::build(trig_case(), build_uniform_mesh(n, n), 1.0 / 64); }

}  // namespace

TEST(Preconditioner, IdentityBlocks) {
    const auto I = SparseMatrix::identity(4);
    std::mt19937 rng(1);
    const auto r = oracle::random_vector(7, rng);
    for (auto kind : {PreconditionerKind::LowerTriangular, PreconditionerKind::BlockDiagonal}) {
        const auto P = BlockPreconditioner::build(kind, I, SparseMatrix::zero(3, 4), SparseMatrix::identity(3));
        const auto z = P.apply(r);
        for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(z[i], r[i]);
        for (int i = 4; i < 7; ++i) EXPECT_DOUBLE_EQ(z[i], -r[i]);
    }
}

TEST(Preconditioner, SchurOfUnitDiffusion) {
    const auto P = BlockPreconditioner::build(PreconditionerKind::BlockDiagonal, SparseMatrix::identity(2),
                                              SparseMatrix(), SparseMatrix::identity(3));
    const auto z = P.apply(Vector{0.0, 0.0, 1.0, -2.0, 3.0});
    EXPECT_EQ(z, (Vector{0.0, 0.0, -1.0, 2.0, -3.0}));
    EXPECT_EQ(P.apply(Vector(5, 0.0)), Vector(5, 0.0));
}

TEST(Preconditioner, SchurApproximationDefinition) {
    const auto sys = trig_system(4);
    const auto& S = sys.schur_approximation();
    const double s = sys.tau() + sys.beta_stab() / sys.params().K;
    const int nu = sys.layout().num_u();
    for (int i = 0; i < S.rows(); ++i) {
        for (int j = 0; j < S.cols(); ++j) {
            const bool free = sys.constraints().is_free(nu + i) && sys.constraints().is_free(nu + j);
            if (free) EXPECT_NEAR(S.at(i, j), s * sys.C().at(i, j), 1e-15 * std::abs(s * sys.C().at(i, j)) + 1e-300);
        }
    }
    const auto P = BlockPreconditioner::build(PreconditionerKind::LowerTriangular, sys);
    EXPECT_EQ(P.size(), sys.layout().total());
    EXPECT_EQ(P.schur().factor.size(), sys.layout().num_p());
}

TEST(Preconditioner, LowerTriangularMatchesForwardSubstitutionOracle) {
    const auto sys = trig_system(4);
    const auto P = BlockPreconditioner::build(PreconditionerKind::LowerTriangular, sys);
    const int nu = sys.layout().num_u(), np = sys.layout().num_p();
    std::mt19937 rng(8);
    const auto r = oracle::random_vector(nu + np, rng);
    const auto z = P.apply(r);

    // Dense forward substitution: A z_u = r_u, then -S z_p = r_p - B^T z_u.
    const Vector ru(r.begin(), r.begin() + nu), rp(r.begin() + nu, r.end());
    const auto zu = oracle::solve(oracle::to_dense(sys.elasticity_block()), ru);
    auto rhs = oracle::matvec(oracle::to_dense(sys.coupling_transpose_block()), zu);
    for (int i = 0; i < np; ++i) rhs[i] -= rp[i];
    const auto zp = oracle::solve(oracle::to_dense(sys.schur_approximation()), rhs);
    Vector ref = zu;
    ref.insert(ref.end(), zp.begin(), zp.end());
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    EXPECT_LE(oracle::max_diff(z, ref), 1e-10 * std::max(1.0, scale));
}

TEST(Preconditioner, LowerTriangularInverseOfDenseBlockOracle) {
    const auto sys = trig_system(4);
    const auto P = BlockPreconditioner::build(PreconditionerKind::LowerTriangular, sys);
    const int nu = sys.layout().num_u(), np = sys.layout().num_p();
    // Explicit [[A, 0], [B^T, -S]].
    const auto A = oracle::to_dense(sys.elasticity_block());
    const auto Bt = oracle::to_dense(sys.coupling_transpose_block());
    const auto S = oracle::to_dense(sys.schur_approximation());
    oracle::Dense Pd(nu + np, std::vector<double>(nu + np, 0.0));
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nu; ++j) Pd[i][j] = A[i][j];
    }
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nu; ++j) Pd[nu + i][j] = Bt[i][j];
        for (int j = 0; j < np; ++j) Pd[nu + i][nu + j] = -S[i][j];
    }
    std::mt19937 rng(12);
    const auto r = oracle::random_vector(nu + np, rng);
    EXPECT_LE(oracle::max_diff(oracle::matvec(Pd, P.apply(r)), r), 1e-10);
}

TEST(Preconditioner, LinearAndKindsAgreeWithoutCoupling) {
    const auto sys = trig_system(5);
    std::mt19937 rng(6);
    const int n = sys.layout().total(), nu = sys.layout().num_u();
    for (auto kind : {PreconditionerKind::LowerTriangular, PreconditionerKind::BlockDiagonal}) {
        const auto P = BlockPreconditioner::build(kind, sys);
        const auto r1 = oracle::random_vector(n, rng), r2 = oracle::random_vector(n, rng);
        Vector sum(n);
        for (int i = 0; i < n; ++i) sum[i] = r1[i] + r2[i];
        const auto z1 = P.apply(r1), z2 = P.apply(r2), zs = P.apply(sum);
        for (int i = 0; i < n; ++i) EXPECT_NEAR(zs[i], z1[i] + z2[i], 1e-12 * (1.0 + std::abs(zs[i])));
    }
    // B^T = 0 and r_p = 0: both kinds coincide.
    const auto A = sys.elasticity_block();
    const auto S = sys.schur_approximation();
    const auto zero_bt = SparseMatrix::zero(S.rows(), A.rows());
    const auto P1 = BlockPreconditioner::build(PreconditionerKind::LowerTriangular, A, zero_bt, S);
    const auto P2 = BlockPreconditioner::build(PreconditionerKind::BlockDiagonal, A, SparseMatrix(), S);
    auto r = oracle::random_vector(n, rng);
    std::fill(r.begin() + nu, r.end(), 0.0);
    EXPECT_EQ(P1.apply(r), P2.apply(r));
}

TEST(Preconditioner, DimensionMismatchRejected) {
    const auto P = BlockPreconditioner::build(PreconditionerKind::BlockDiagonal, trig_system(2));
    Vector r(3), z(3);
    EXPECT_THROW(P.apply(r, z), std::invalid_argument);
}
