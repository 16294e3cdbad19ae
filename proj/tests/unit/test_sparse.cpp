#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "biot/assembly.hpp"
#include "biot/mesh.hpp"
#include "biot/sparse_matrix.hpp"
#include "biot/spd_factorization.hpp"
#include "oracles.hpp"

using namespace biot;

TEST(Sparse, IdentityAndSmallProduct) {
    const Vector x{1.0, -2.0, 3.5, 0.0, 7.0};
    EXPECT_EQ(spmv(SparseMatrix::identity(5), x), x);

    const std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, 1.0}, {1, 1, 3.0}};
    const auto m = SparseMatrix::from_triplets(2, 2, t);
    EXPECT_EQ(spmv(m, Vector{1.0, 1.0}), (Vector{3.0, 3.0}));
}

TEST(Sparse, SpmvMatchesDenseOracle) {
    std::mt19937 rng(7);
    for (int n : {20, 35, 50}) {
        const auto m = oracle::random_sparse(n, n, 0.3, rng);
        const auto x = oracle::random_vector(n, rng);
        const auto y = spmv(m, x);
        const auto ref = oracle::matvec(oracle::to_dense(m), x);
        double scale = 0.0;
        for (double v : ref) scale = std::max(scale, std::abs(v));
        EXPECT_LE(oracle::max_diff(y, ref), 1e-13 * std::max(1.0, scale)) << "n=" << n;
    }
}

TEST(Sparse, RejectsDimensionMismatch) {
    const auto m = SparseMatrix::identity(3);
    Vector x(4), y(3);
    EXPECT_THROW(m.multiply(x, y), std::invalid_argument);
}

TEST(Sparse, TripletsSumDuplicates) {
    const std::vector<Triplet> t{{1, 2, 1.5}, {1, 2, 2.0}, {0, 0, 0.0}};
    const auto m = SparseMatrix::from_triplets(2, 3, t);
    EXPECT_DOUBLE_EQ(m.at(1, 2), 3.5);
    EXPECT_EQ(m.nnz(), 2);
    EXPECT_EQ(m.at(0, 1), 0.0);
}

TEST(Sparse, ConstructorValidatesOrdering) {
    EXPECT_THROW(SparseMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), std::invalid_argument);
}

TEST(Sparse, TransposeIsInvolution) {
    std::mt19937 rng(3);
    const auto m = oracle::random_sparse(13, 9, 0.4, rng);
    const auto tt = m.transpose().transpose();
    EXPECT_EQ(oracle::to_dense(tt), oracle::to_dense(m));
    EXPECT_EQ(m.transpose().at(4, 11), m.at(11, 4));
}

TEST(Sparse, AddMultiplyAndBlocks) {
    std::mt19937 rng(11);
    const auto a = oracle::random_sparse(6, 6, 0.5, rng);
    const auto b = oracle::random_sparse(6, 6, 0.5, rng);
    const auto s = add(a, 2.0, b, -1.0);
    const auto p = multiply(a, b);
    const auto da = oracle::to_dense(a), db = oracle::to_dense(b);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            EXPECT_NEAR(s.at(i, j), 2.0 * da[i][j] - db[i][j], 1e-15);
            double ref = 0.0;
            for (int k = 0; k < 6; ++k) ref += da[i][k] * db[k][j];
            EXPECT_NEAR(p.at(i, j), ref, 1e-14);
        }
    }

    const auto big = block_2x2(a, b, SparseMatrix(), a.scaled(3.0), 6, 6, 6, 6);
    EXPECT_EQ(big.rows(), 12);
    EXPECT_EQ(oracle::to_dense(big.block(0, 6, 6, 12)), db);
    EXPECT_EQ(big.block(6, 12, 0, 6).nnz(), 0);
    EXPECT_DOUBLE_EQ(big.at(7, 8), 3.0 * da[1][2]);
}

TEST(Sparse, TripletExport) {
    const std::vector<Triplet> t{{0, 1, 2.5}};
    std::ostringstream os;
    SparseMatrix::from_triplets(2, 3, t).write_triplets(os);
    EXPECT_EQ(os.str(), "2 3 1\n0 1 2.5\n");
}

TEST(SpdFactorization, TrivialSolves) {
    const Vector r{1.0, -2.0, 3.0};
    EXPECT_EQ(factor_spd(SparseMatrix::identity(3)).solve(r), r);

    std::vector<Triplet> t;
    for (int i = 0; i < 5; ++i) t.push_back({i, i, i + 1.0});
    const auto x = factor_spd(SparseMatrix::from_triplets(5, 5, t)).solve(Vector(5, 1.0));
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(x[i], 1.0 / (i + 1), 1e-15);
}

TEST(SpdFactorization, DiffusionWithOneDirichletNodeMatchesDenseOracle) {
    const auto mesh = build_uniform_mesh(4, 4);
    const auto C = assemble_diffusion(mesh, MaterialParams::make(1.0, 0.3, 1.0, 1.0));
    // Eliminate node 0: unit row and column.
    std::vector<Triplet> t;
    for (int i = 0; i < C.rows(); ++i) {
        auto cols = C.row_cols(i);
        auto vals = C.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (i != 0 && cols[k] != 0) t.push_back({i, cols[k], vals[k]});
        }
    }
    t.push_back({0, 0, 1.0});
    const auto M = SparseMatrix::from_triplets(C.rows(), C.cols(), t);
    std::mt19937 rng(5);
    const auto r = oracle::random_vector(M.rows(), rng);
    const auto x = factor_spd(M).solve(r);
    const auto ref = oracle::solve(oracle::to_dense(M), r);
    EXPECT_LE(oracle::max_diff(x, ref), 1e-10);
}

TEST(SpdFactorization, ResidualInvariant) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const auto M = oracle::random_spd(40, rng);
        const auto f = factor_spd(M);
        const auto r = oracle::random_vector(40, rng);
        const auto back = spmv(M, f.solve(r));
        Vector diff(40);
        for (int i = 0; i < 40; ++i) diff[i] = back[i] - r[i];
        EXPECT_LE(norm2(diff), 1e-10 * norm2(r));
    }
}

TEST(SpdFactorization, PermutationAndConcurrentSolves) {
    const auto M = oracle::laplacian_2d(10);
    const auto f = factor_spd(M);
    auto perm = f.permutation();
    std::sort(perm.begin(), perm.end());
    for (int i = 0; i < 100; ++i) EXPECT_EQ(perm[i], i);
    EXPECT_GE(f.factor_nnz(), 100);
    const SpdFactorization copy = f;
    const Vector r(100, 1.0);
    EXPECT_EQ(copy.solve(r), f.solve(r));
}

TEST(SpdFactorization, ReportsFailures) {
    const std::vector<Triplet> asym{{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}};
    EXPECT_THROW(factor_spd(SparseMatrix::from_triplets(2, 2, asym)), std::invalid_argument);

    const std::vector<Triplet> indef{{0, 0, 2.0}, {1, 1, -1.0}, {2, 2, 3.0}};
    try {
        factor_spd(SparseMatrix::from_triplets(3, 3, indef));
        FAIL() << "expected NotSpdError";
    } catch (const NotSpdError& e) {
        EXPECT_EQ(e.index(), 1);
        EXPECT_LE(e.pivot(), 0.0);
    }
}

TEST(Cg, TrivialCases) {
    const Vector b{1.0, 2.0, 3.0};
    const auto r = cg_solve(SparseMatrix::identity(3), b, Vector(3, 0.0), 1e-12, 10);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1);

    const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 10.0}, {2, 2, 100.0}};
    const auto d = cg_solve(SparseMatrix::from_triplets(3, 3, t), Vector(3, 1.0), Vector(3, 0.0), 1e-12, 10);
    EXPECT_TRUE(d.converged);
    EXPECT_NEAR(d.x[0], 1.0, 1e-12);
    EXPECT_NEAR(d.x[1], 0.1, 1e-12);
    EXPECT_NEAR(d.x[2], 0.01, 1e-12);
}

TEST(Cg, LaplacianMatchesFactorization) {
    // 7 x 7 grid is 49 unknowns, padded with one decoupled unknown to reach 50.
    auto L = oracle::laplacian_2d(7);
    L = block_2x2(L, SparseMatrix(), SparseMatrix(), SparseMatrix::identity(1), 49, 49, 1, 1);
    std::mt19937 rng(23);
    const auto b = oracle::random_vector(50, rng);
    const auto cg = cg_solve(L, b, Vector(50, 0.0), 1e-12, 500);
    ASSERT_TRUE(cg.converged);
    EXPECT_LE(oracle::max_diff(cg.x, factor_spd(L).solve(b)), 1e-8);
}

TEST(Cg, FlagsNonConvergenceAndBreakdown) {
    const auto L = oracle::laplacian_2d(10);
    const auto r = cg_solve(L, Vector(100, 1.0), Vector(100, 0.0), 1e-14, 2);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 2);

    const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, -1.0}};
    EXPECT_THROW(cg_solve(SparseMatrix::from_triplets(2, 2, t), Vector{1.0, 1.0}, Vector(2, 0.0), 1e-10, 5),
                 CgBreakdown);
}
