#include "biot/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace biot {

ElementGeometry element_geometry(const Point& a, const Point& b, const Point& c) {
    const double two_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (two_area == 0.0 || !std::isfinite(two_area)) {
        throw std::invalid_argument("element_geometry: degenerate triangle");
    }
    ElementGeometry g;
    g.area = 0.5 * std::abs(two_area);
    const std::array<Point, 3> v{a, b, c};
    for (int i = 0; i < 3; ++i) {
        const Point& pj = v[(i + 1) % 3];
        const Point& pk = v[(i + 2) % 3];
        g.dx[i] = (pj.y - pk.y) / two_area;
        g.dy[i] = (pk.x - pj.x) / two_area;
    }
    return g;
}

std::array<std::array<double, 6>, 6> element_elasticity(const ElementGeometry& g, double lambda, double mu) {
    std::array<std::array<double, 6>, 6> k{};
    for (int a = 0; a < 3; ++a) {
        const std::array<double, 2> ga{g.dx[a], g.dy[a]};
        for (int b = 0; b < 3; ++b) {
            const std::array<double, 2> gb{g.dx[b], g.dy[b]};
            const double grad_dot = ga[0] * gb[0] + ga[1] * gb[1];
            for (int c = 0; c < 2; ++c) {
                for (int d = 0; d < 2; ++d) {
                    // 2 mu eps(phi_a e_c) : eps(phi_b e_d) = mu (delta_cd grad.grad + d_d phi_a d_c phi_b)
                    const double shear = mu * ((c == d ? grad_dot : 0.0) + ga[d] * gb[c]);
                    const double volumetric = lambda * ga[c] * gb[d];
                    k[2 * a + c][2 * b + d] = g.area * (shear + volumetric);
                }
            }
        }
    }
    return k;
}

namespace {

ElementGeometry geometry_of(const StructuredTriMesh& mesh, const Triangle& t) {
    return element_geometry(mesh.node(t[0]), mesh.node(t[1]), mesh.node(t[2]));
}

}  // namespace

SparseMatrix assemble_elasticity(const StructuredTriMesh& mesh, const MaterialParams& params) {
    std::vector<Triplet> entries;
    entries.reserve(36 * static_cast<std::size_t>(mesh.num_triangles()));
    for (const auto& t : mesh.triangles()) {
        const auto k = element_elasticity(geometry_of(mesh, t), params.lambda, params.mu);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                entries.push_back({2 * t[i / 2] + i % 2, 2 * t[j / 2] + j % 2, k[i][j]});
            }
        }
    }
    const int n = 2 * mesh.num_nodes();
    return SparseMatrix::from_triplets(n, n, entries);
}

SparseMatrix assemble_coupling(const StructuredTriMesh& mesh, const MaterialParams& params) {
    std::vector<Triplet> entries;
    entries.reserve(18 * static_cast<std::size_t>(mesh.num_triangles()));
    for (const auto& t : mesh.triangles()) {
        const auto g = geometry_of(mesh, t);
        // int_T phi_j = |T| / 3 and grad phi_a is constant on T.
        const double w = -params.alpha * g.area / 3.0;
        for (int a = 0; a < 3; ++a) {
            for (int j = 0; j < 3; ++j) {
                entries.push_back({2 * t[a], t[j], w * g.dx[a]});
                entries.push_back({2 * t[a] + 1, t[j], w * g.dy[a]});
            }
        }
    }
    return SparseMatrix::from_triplets(2 * mesh.num_nodes(), mesh.num_nodes(), entries);
}

SparseMatrix assemble_diffusion(const StructuredTriMesh& mesh, const MaterialParams& params) {
    std::vector<Triplet> entries;
    entries.reserve(9 * static_cast<std::size_t>(mesh.num_triangles()));
    for (const auto& t : mesh.triangles()) {
        const auto g = geometry_of(mesh, t);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                entries.push_back({t[i], t[j], params.K * g.area * (g.dx[i] * g.dx[j] + g.dy[i] * g.dy[j])});
            }
        }
    }
    return SparseMatrix::from_triplets(mesh.num_nodes(), mesh.num_nodes(), entries);
}

LoadParts assemble_load_parts(const StructuredTriMesh& mesh, const BenchmarkCase& bcase, double t) {
    LoadParts parts;
    parts.F.assign(2 * mesh.num_nodes(), 0.0);
    parts.G.assign(mesh.num_nodes(), 0.0);
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto& v = mesh.triangles()[tri];
        const double w = std::abs(mesh.signed_area(tri)) / 3.0;
        for (int a = 0; a < 3; ++a) {
            const Point& p = mesh.node(v[a]);
            if (bcase.body_force) {
                const auto f = bcase.body_force(p.x, p.y, t);
                parts.F[2 * v[a]] += w * f[0];
                parts.F[2 * v[a] + 1] += w * f[1];
            }
            if (bcase.source) parts.G[v[a]] += w * bcase.source(p.x, p.y, t);
        }
    }
    for (const auto& src : bcase.point_sources) {
        if (!mesh.domain().contains(src.location, 1e-12 * mesh.h())) {
            throw std::invalid_argument("assemble_loads: point source at (" + std::to_string(src.location.x) + ", " +
                                        std::to_string(src.location.y) + ") lies outside the domain");
        }
        parts.G[nearest_node(mesh, src.location)] += src.weight(t);
    }
    return parts;
}

Vector assemble_loads(const StructuredTriMesh& mesh, const BenchmarkCase& bcase, double t, double tau) {
    auto parts = assemble_load_parts(mesh, bcase, t);
    Vector out(3 * mesh.num_nodes());
    std::copy(parts.F.begin(), parts.F.end(), out.begin());
    for (std::size_t j = 0; j < parts.G.size(); ++j) out[parts.F.size() + j] = -tau * parts.G[j];
    return out;
}

StepOperators build_step_operators(const SparseMatrix& A, const SparseMatrix& B, const SparseMatrix& C, double tau,
                                   double beta_stab, double K) {
    const int nu = A.rows();
    const int np = C.rows();
    if (A.cols() != nu || B.rows() != nu || B.cols() != np || C.cols() != np) {
        throw std::invalid_argument("build_step_operators: inconsistent block dimensions");
    }
    const SparseMatrix Bt = B.transpose();
    const double stab = beta_stab / K;
    StepOperators ops;
    ops.step = block_2x2(A, B, Bt, C.scaled(-(tau + stab)), nu, nu, np, np);
    ops.history = block_2x2(SparseMatrix(), SparseMatrix(), Bt, C.scaled(-stab), nu, nu, np, np);
    return ops;
}

}  // namespace biot
