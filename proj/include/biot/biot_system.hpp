#pragma once

#include <memory>
#include <span>
#include <vector>

#include "biot/assembly.hpp"
#include "biot/benchmark_case.hpp"
#include "biot/mesh.hpp"
#include "biot/sparse_matrix.hpp"

namespace biot {

struct DirichletDof {
    int dof;
    int node;
    ScalarField value;
};

/**
 * Essential conditions of a case on a mesh: prescribed unknowns and an
 * optional group of unknowns tied to one master (rigid plate).
 *
 * Tied unknowns are handled by the congruence x = T y, where T copies the
 * master value into every slave; the constrained operator is T^T M T with
 * unit diagonal on slave rows, so slaves solve to zero in y and are restored
 * by `to_physical`. Prescribed unknowns are eliminated symmetrically.
 */
class ConstraintSet {
public:
    ConstraintSet() = default;
    ConstraintSet(const StructuredTriMesh& mesh, const BenchmarkCase& bcase);

    int total() const { return static_cast<int>(kind_.size()); }
    std::span<const DirichletDof> dirichlet() const { return dirichlet_; }
    std::span<const int> slaves() const { return slaves_; }
    int master() const { return master_; }
    double resultant() const { return resultant_; }
    bool is_dirichlet(int dof) const { return kind_[dof] == Kind::Dirichlet; }
    bool is_slave(int dof) const { return kind_[dof] == Kind::Slave; }
    bool is_free(int dof) const { return kind_[dof] == Kind::Free; }

    /// Prescribed values at time t, zero on all other unknowns.
    Vector prescribed(double t, const StructuredTriMesh& mesh) const;

    /// T^T m T with prescribed and slave rows/columns replaced by the identity.
    SparseMatrix constrain_operator(const SparseMatrix& m) const;
    /// T^T m T with prescribed and slave rows zeroed; columns kept.
    SparseMatrix constrain_history(const SparseMatrix& m) const;
    /// Columns of T^T m T that multiply prescribed unknowns, on unconstrained rows only.
    SparseMatrix lifting_columns(const SparseMatrix& m) const;

    /// T^T f - lift * g(t); prescribed rows get g(t), slave rows 0, master row gets the plate resultant.
    Vector constrain_rhs(std::span<const double> f, const SparseMatrix& lift, std::span<const double> g) const;

    /// x = T y.
    Vector to_physical(std::span<const double> y) const;
    /// Representative y of a physical state (slave entries dropped).
    Vector to_reduced(std::span<const double> x) const;

private:
    enum class Kind : unsigned char { Free, Dirichlet, Slave };

    SparseMatrix tie_map() const;

    std::vector<Kind> kind_;
    std::vector<DirichletDof> dirichlet_;
    std::vector<int> slaves_;
    int master_ = -1;
    double resultant_ = 0.0;
};

/**
 * Assembled stabilized P1-P1 system for one case, mesh and time step. Holds
 * the raw blocks A, B, C, the constrained step operator and history operator,
 * and the blocks the preconditioners need. Immutable after `build`; shared
 * read-only by all time-loop engines.
 */
class BiotSystem {
public:
    static BiotSystem build(const BenchmarkCase& bcase, const StructuredTriMesh& mesh, double tau);

    const StructuredTriMesh& mesh() const { return *mesh_; }
    const BenchmarkCase& bcase() const { return *case_; }
    const MaterialParams& params() const { return case_->params; }
    DofLayout layout() const { return {mesh_->num_nodes()}; }
    double tau() const { return tau_; }
    double beta_stab() const { return beta_stab_; }
    const ConstraintSet& constraints() const { return constraints_; }

    const SparseMatrix& A() const { return A_; }
    const SparseMatrix& B() const { return B_; }
    const SparseMatrix& C() const { return C_; }
    /// Unconstrained [[A, B], [B^T, -(tau + beta/K) C]] and [[0, 0], [B^T, -(beta/K) C]].
    const StepOperators& raw_operators() const { return raw_; }

    /// Constrained step operator; symmetric indefinite.
    const SparseMatrix& step_matrix() const { return step_; }
    const SparseMatrix& history_matrix() const { return history_; }

    /// Displacement block of the constrained step operator (SPD).
    const SparseMatrix& elasticity_block() const { return elasticity_block_; }
    /// Lower-left block of the constrained step operator.
    const SparseMatrix& coupling_transpose_block() const { return coupling_t_block_; }
    /// (tau + beta/K) C on unconstrained pressure unknowns, unit diagonal on prescribed ones.
    const SparseMatrix& schur_approximation() const { return schur_; }

    /// Constrained load f^n at time t (loads, prescribed values, lifting, plate resultant).
    Vector step_load(double t) const;
    /// Constrained initial state X^0.
    Vector initial_state() const;

    Vector to_physical(std::span<const double> y) const { return constraints_.to_physical(y); }
    /// Pressure part of a physical state.
    std::span<const double> pressure(std::span<const double> x) const {
        return x.subspan(layout().num_u(), layout().num_p());
    }

private:
    std::shared_ptr<const StructuredTriMesh> mesh_;
    std::shared_ptr<const BenchmarkCase> case_;
    double tau_ = 0.0;
    double beta_stab_ = 0.0;
    ConstraintSet constraints_;
    SparseMatrix A_, B_, C_;
    StepOperators raw_;
    SparseMatrix step_, history_, lift_;
    SparseMatrix elasticity_block_, coupling_t_block_, schur_;
};

}  // namespace biot
