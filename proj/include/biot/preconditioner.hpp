#pragma once

#include <span>

#include "biot/biot_system.hpp"
#include "biot/sparse_matrix.hpp"
#include "biot/spd_factorization.hpp"

namespace biot {

/// Action z = P^{-1} r. Implementations must be safe for concurrent `apply` calls.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual int size() const = 0;
    virtual void apply(std::span<const double> r, std::span<double> z) const = 0;

    Vector apply(std::span<const double> r) const {
        Vector z(r.size());
        apply(r, z);
        return z;
    }
};

class IdentityPreconditioner final : public Preconditioner {
public:
    explicit IdentityPreconditioner(int n) : n_(n) {}
    int size() const override { return n_; }
    void apply(std::span<const double> r, std::span<double> z) const override;

private:
    int n_;
};

/// Approximate Schur complement (tau + beta/K) C and its factorization.
struct SchurApprox {
    SparseMatrix S;
    SpdFactorization factor;
};

enum class PreconditionerKind {
    LowerTriangular,  // [[A, 0], [B^T, -S]]
    BlockDiagonal,    // [[A, 0], [0, -S]]
};

const char* to_string(PreconditionerKind kind);

/**
 * Block preconditioner for the saddle-point step operator. Both inverse
 * blocks are applied exactly through sparse factorizations computed once
 * in `build`.
 */
class BlockPreconditioner final : public Preconditioner {
public:
    static BlockPreconditioner build(PreconditionerKind kind, const BiotSystem& system);
    /// Build from explicit blocks; `Bt` may be empty for BlockDiagonal.
    static BlockPreconditioner build(PreconditionerKind kind, const SparseMatrix& A, const SparseMatrix& Bt,
                                     const SparseMatrix& S);

    PreconditionerKind kind() const { return kind_; }
    int size() const override { return nu_ + np_; }
    int displacement_size() const { return nu_; }
    int pressure_size() const { return np_; }
    const SchurApprox& schur() const { return schur_; }

    /// LowerTriangular: z_u = A^{-1} r_u, z_p = S^{-1}(B^T z_u - r_p).
    /// BlockDiagonal:   z_u = A^{-1} r_u, z_p = -S^{-1} r_p.
    void apply(std::span<const double> r, std::span<double> z) const override;
    using Preconditioner::apply;

private:
    PreconditionerKind kind_ = PreconditionerKind::LowerTriangular;
    int nu_ = 0;
    int np_ = 0;
    SpdFactorization a_factor_;
    SparseMatrix bt_;
    SchurApprox schur_;
};

}  // namespace biot
