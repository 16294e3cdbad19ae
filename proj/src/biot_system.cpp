#include "biot/biot_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace biot {

namespace {

const FieldBc& component_bc(const SideConditions& sc, int component) {
    switch (component) {
    case 0: return sc.ux;
    case 1: return sc.uy;
    default: return sc.p;
    }
}

bool same_values(const ScalarField& a, const ScalarField& b, const Point& p) {
    for (double t : {0.0, 0.37, 1.0}) {
        const double va = a(p.x, p.y, t);
        const double vb = b(p.x, p.y, t);
        if (std::abs(va - vb) > 1e-12 * (1.0 + std::abs(va))) return false;
    }
    return true;
}

}  // namespace

ConstraintSet::ConstraintSet(const StructuredTriMesh& mesh, const BenchmarkCase& bcase) {
    const DofLayout layout{mesh.num_nodes()};
    kind_.assign(layout.total(), Kind::Free);

    for (int node = 0; node < mesh.num_nodes(); ++node) {
        if (!mesh.on_boundary(node)) continue;
        for (int comp = 0; comp < 3; ++comp) {
            const FieldBc* chosen = nullptr;
            for (Side side : all_sides) {
                if (!mesh.has_tag(node, side)) continue;
                const FieldBc& bc = component_bc(bcase.on(side), comp);
                if (!bc.is_dirichlet()) continue;
                if (chosen != nullptr && !same_values(chosen->value, bc.value, mesh.node(node))) {
                    throw std::invalid_argument("conflicting Dirichlet data at corner node " + std::to_string(node));
                }
                if (chosen == nullptr) chosen = &bc;
            }
            if (chosen == nullptr) continue;
            const int dof = comp < 2 ? layout.u(node, comp) : layout.p(node);
            kind_[dof] = Kind::Dirichlet;
            dirichlet_.push_back({dof, node, chosen->value});
        }
    }
    std::sort(dirichlet_.begin(), dirichlet_.end(), [](const auto& a, const auto& b) { return a.dof < b.dof; });

    if (bcase.plate) {
        const auto& plate = *bcase.plate;
        if (plate.component < 0 || plate.component > 1) {
            throw std::invalid_argument("TiedPlate: component must be 0 or 1");
        }
        std::vector<int> dofs;
        for (int node : boundary_nodes(mesh, plate.side)) {
            const int dof = layout.u(node, plate.component);
            if (kind_[dof] == Kind::Dirichlet) {
                throw std::invalid_argument("TiedPlate: unknown " + std::to_string(dof) +
                                            " is both tied and prescribed");
            }
            dofs.push_back(dof);
        }
        std::sort(dofs.begin(), dofs.end());
        master_ = dofs.front();
        resultant_ = plate.resultant;
        for (std::size_t i = 1; i < dofs.size(); ++i) {
            slaves_.push_back(dofs[i]);
            kind_[dofs[i]] = Kind::Slave;
        }
    }
}

Vector ConstraintSet::prescribed(double t, const StructuredTriMesh& mesh) const {
    Vector g(total(), 0.0);
    for (const auto& d : dirichlet_) {
        const Point& p = mesh.node(d.node);
        g[d.dof] = d.value(p.x, p.y, t);
    }
    return g;
}

SparseMatrix ConstraintSet::tie_map() const {
    const int n = total();
    std::vector<Triplet> entries;
    entries.reserve(n + slaves_.size());
    for (int j = 0; j < n; ++j) {
        if (kind_[j] == Kind::Slave) continue;
        entries.push_back({j, j, 1.0});
        if (j == master_) {
            for (int s : slaves_) entries.push_back({s, j, 1.0});
        }
    }
    return SparseMatrix::from_triplets(n, n, entries);
}

namespace {

SparseMatrix congruence(const SparseMatrix& m, const SparseMatrix& t) {
    return multiply(t.transpose(), multiply(m, t));
}

}  // namespace

SparseMatrix ConstraintSet::constrain_operator(const SparseMatrix& m) const {
    const SparseMatrix mt = slaves_.empty() ? m : congruence(m, tie_map());
    std::vector<int> offsets(mt.rows() + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(mt.nnz());
    vals.reserve(mt.nnz());
    for (int r = 0; r < mt.rows(); ++r) {
        if (kind_[r] != Kind::Free) {
            cols.push_back(r);
            vals.push_back(1.0);
        } else {
            const auto rc = mt.row_cols(r);
            const auto rv = mt.row_values(r);
            for (std::size_t k = 0; k < rc.size(); ++k) {
                if (kind_[rc[k]] != Kind::Free) continue;
                cols.push_back(rc[k]);
                vals.push_back(rv[k]);
            }
        }
        offsets[r + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(mt.rows(), mt.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix ConstraintSet::constrain_history(const SparseMatrix& m) const {
    const SparseMatrix mt = slaves_.empty() ? m : congruence(m, tie_map());
    std::vector<int> offsets(mt.rows() + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    for (int r = 0; r < mt.rows(); ++r) {
        if (kind_[r] == Kind::Free) {
            const auto rc = mt.row_cols(r);
            const auto rv = mt.row_values(r);
            cols.insert(cols.end(), rc.begin(), rc.end());
            vals.insert(vals.end(), rv.begin(), rv.end());
        }
        offsets[r + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(mt.rows(), mt.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix ConstraintSet::lifting_columns(const SparseMatrix& m) const {
    const SparseMatrix mt = slaves_.empty() ? m : congruence(m, tie_map());
    std::vector<int> offsets(mt.rows() + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    for (int r = 0; r < mt.rows(); ++r) {
        if (kind_[r] == Kind::Free) {
            const auto rc = mt.row_cols(r);
            const auto rv = mt.row_values(r);
            for (std::size_t k = 0; k < rc.size(); ++k) {
                if (kind_[rc[k]] != Kind::Dirichlet) continue;
                cols.push_back(rc[k]);
                vals.push_back(rv[k]);
            }
        }
        offsets[r + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(mt.rows(), mt.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

Vector ConstraintSet::constrain_rhs(std::span<const double> f, const SparseMatrix& lift,
                                   std::span<const double> g) const {
    if (static_cast<int>(f.size()) != total() || static_cast<int>(g.size()) != total()) {
        throw std::invalid_argument("ConstraintSet::constrain_rhs: dimension mismatch");
    }
    Vector r(f.begin(), f.end());
    for (int s : slaves_) r[master_] += f[s];
    lift.multiply_add(-1.0, g, r);
    for (int i = 0; i < total(); ++i) {
        if (kind_[i] == Kind::Dirichlet) r[i] = g[i];
        else if (kind_[i] == Kind::Slave) r[i] = 0.0;
    }
    if (master_ >= 0) r[master_] += resultant_;
    return r;
}

Vector ConstraintSet::to_physical(std::span<const double> y) const {
    Vector x(y.begin(), y.end());
    for (int s : slaves_) x[s] = y[master_];
    return x;
}

Vector ConstraintSet::to_reduced(std::span<const double> x) const {
    Vector y(x.begin(), x.end());
    for (int s : slaves_) y[s] = 0.0;
    return y;
}

BiotSystem BiotSystem::build(const BenchmarkCase& bcase, const StructuredTriMesh& mesh, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("BiotSystem::build: tau must be positive");
    BiotSystem sys;
    sys.mesh_ = std::make_shared<const StructuredTriMesh>(mesh);
    sys.case_ = std::make_shared<const BenchmarkCase>(bcase);
    sys.tau_ = tau;
    const auto& params = bcase.params;
    sys.beta_stab_ = bcase.stabilized ? stabilization_beta(mesh.h(), params.lambda, params.mu) : 0.0;

    sys.A_ = assemble_elasticity(mesh, params);
    sys.B_ = assemble_coupling(mesh, params);
    sys.C_ = assemble_diffusion(mesh, params);
    sys.raw_ = build_step_operators(sys.A_, sys.B_, sys.C_, tau, sys.beta_stab_, params.K);

    sys.constraints_ = ConstraintSet(mesh, bcase);
    sys.step_ = sys.constraints_.constrain_operator(sys.raw_.step);
    sys.history_ = sys.constraints_.constrain_history(sys.raw_.history);
    sys.lift_ = sys.constraints_.lifting_columns(sys.raw_.step);

    const DofLayout layout = sys.layout();
    const int nu = layout.num_u();
    const int total = layout.total();
    sys.elasticity_block_ = sys.step_.block(0, nu, 0, nu);
    sys.coupling_t_block_ = sys.step_.block(nu, total, 0, nu);
    sys.schur_ = sys.step_.block(nu, total, nu, total).scaled(-1.0);
    // Prescribed pressure rows carry -1 after the sign flip; keep S positive definite.
    auto vals = sys.schur_.values_mut();
    const auto offsets = sys.schur_.row_offsets();
    const auto cols = sys.schur_.col_indices();
    for (int r = 0; r < layout.num_p(); ++r) {
        if (sys.constraints_.is_free(nu + r)) continue;
        for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
            if (cols[k] == r) vals[k] = 1.0;
        }
    }
    return sys;
}

Vector BiotSystem::step_load(double t) const {
    const Vector f = assemble_loads(*mesh_, *case_, t, tau_);
    const Vector g = constraints_.prescribed(t, *mesh_);
    return constraints_.constrain_rhs(f, lift_, g);
}

Vector BiotSystem::initial_state() const {
    const DofLayout layout = this->layout();
    Vector x(layout.total(), 0.0);
    for (int i = 0; i < mesh_->num_nodes(); ++i) {
        const Point& p = mesh_->node(i);
        if (case_->initial_displacement) {
            const auto u = case_->initial_displacement(p.x, p.y, 0.0);
            x[layout.u(i, 0)] = u[0];
            x[layout.u(i, 1)] = u[1];
        }
        if (case_->initial_pressure) x[layout.p(i)] = case_->initial_pressure(p.x, p.y, 0.0);
    }
    return constraints_.to_reduced(x);
}

}  // namespace biot
