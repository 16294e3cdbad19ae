#pragma once

#include <array>

#include "biot/benchmark_case.hpp"
#include "biot/material.hpp"
#include "biot/mesh.hpp"
#include "biot/sparse_matrix.hpp"

namespace biot {

/**
 * Unknown ordering: displacement first, interleaved per node (ux, uy), then
 * one pressure unknown per node.
 */
struct DofLayout {
    int nodes = 0;

    int num_u() const { return 2 * nodes; }
    int num_p() const { return nodes; }
    int total() const { return 3 * nodes; }
    int u(int node, int component) const { return 2 * node + component; }
    int p(int node) const { return 2 * nodes + node; }
};

/// Gradients of the three linear basis functions and the area of one triangle.
struct ElementGeometry {
    double area = 0.0;
    std::array<double, 3> dx{};  // d(phi_a)/dx
    std::array<double, 3> dy{};  // d(phi_a)/dy
};

/// Throws std::invalid_argument for a zero-area triangle.
ElementGeometry element_geometry(const Point& a, const Point& b, const Point& c);

/// 6x6 local matrix of 2 mu (eps(u), eps(v)) + lambda (div u, div v); local dof 2a + c.
std::array<std::array<double, 6>, 6> element_elasticity(const ElementGeometry& g, double lambda, double mu);

SparseMatrix assemble_elasticity(const StructuredTriMesh& mesh, const MaterialParams& params);

/// 2N x N block for -alpha (q, div v), i.e. B(2a + c, j) = -alpha * int phi_j d_c phi_a.
SparseMatrix assemble_coupling(const StructuredTriMesh& mesh, const MaterialParams& params);

/// K (grad p, grad q).
SparseMatrix assemble_diffusion(const StructuredTriMesh& mesh, const MaterialParams& params);

/**
 * Right-hand block vector (F, -tau G) at time t. Area integrals use the vertex
 * rule; point sources are added to the nearest node.
 */
Vector assemble_loads(const StructuredTriMesh& mesh, const BenchmarkCase& bcase, double t, double tau);

/// Load vectors before the -tau scaling; exposed for tests.
struct LoadParts {
    Vector F;  // size 2N
    Vector G;  // size N
};
LoadParts assemble_load_parts(const StructuredTriMesh& mesh, const BenchmarkCase& bcase, double t);

struct StepOperators {
    SparseMatrix step;     // [[A, B], [B^T, -(tau + beta/K) C]]
    SparseMatrix history;  // [[0, 0], [B^T, -(beta/K) C]]
};

StepOperators build_step_operators(const SparseMatrix& A, const SparseMatrix& B, const SparseMatrix& C, double tau,
                                   double beta_stab, double K);

}  // namespace biot
