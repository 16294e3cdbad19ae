#include "biot/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace biot {

bool Rect::contains(Point p, double eps) const {
    return p.x >= ax - eps && p.x <= bx + eps && p.y >= ay - eps && p.y <= by + eps;
}

const char* to_string(Side side) {
    switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
    }
    return "?";
}

StructuredTriMesh::StructuredTriMesh(int nx, int ny, const Rect& domain, std::vector<Point> nodes,
                                     std::vector<Triangle> triangles)
    : nx_(nx), ny_(ny), domain_(domain), nodes_(std::move(nodes)), triangles_(std::move(triangles)) {
    const double tol_x = 1e-12 * std::abs(domain_.width());
    const double tol_y = 1e-12 * std::abs(domain_.height());
    tags_.assign(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Point& p = nodes_[i];
        std::uint8_t t = 0;
        if (std::abs(p.x - domain_.ax) <= tol_x) t |= static_cast<std::uint8_t>(Side::Left);
        if (std::abs(p.x - domain_.bx) <= tol_x) t |= static_cast<std::uint8_t>(Side::Right);
        if (std::abs(p.y - domain_.ay) <= tol_y) t |= static_cast<std::uint8_t>(Side::Bottom);
        if (std::abs(p.y - domain_.by) <= tol_y) t |= static_cast<std::uint8_t>(Side::Top);
        tags_[i] = t;
    }
}

double StructuredTriMesh::h() const { return std::max(dx(), dy()); }

double StructuredTriMesh::signed_area(int triangle) const {
    const auto& t = triangles_[triangle];
    const Point& a = nodes_[t[0]];
    const Point& b = nodes_[t[1]];
    const Point& c = nodes_[t[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

void StructuredTriMesh::write_text(std::ostream& out) const {
    out << "nodes " << nodes_.size() << '\n';
    out.precision(17);
    for (const auto& p : nodes_) out << p.x << ' ' << p.y << '\n';
    out << "triangles " << triangles_.size() << '\n';
    for (const auto& t : triangles_) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

StructuredTriMesh build_uniform_mesh(int nx, int ny, const Rect& domain) {
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("build_uniform_mesh: cell counts must be positive (nx=" +
                                    std::to_string(nx) + ", ny=" + std::to_string(ny) + ")");
    }
    if (!(domain.bx > domain.ax) || !(domain.by > domain.ay)) {
        throw std::invalid_argument("build_uniform_mesh: degenerate rectangle");
    }
    const double dx = domain.width() / nx;
    const double dy = domain.height() / ny;

    std::vector<Point> nodes;
    nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        // Pin the far edges exactly so boundary tagging never depends on rounding.
        const double y = (j == ny) ? domain.by : domain.ay + j * dy;
        for (int i = 0; i <= nx; ++i) {
            const double x = (i == nx) ? domain.bx : domain.ax + i * dx;
            nodes.push_back({x, y});
        }
    }

    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(2) * nx * ny);
    const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int sw = id(i, j), se = id(i + 1, j), nw = id(i, j + 1), ne = id(i + 1, j + 1);
            triangles.push_back({sw, se, ne});
            triangles.push_back({sw, ne, nw});
        }
    }
    return StructuredTriMesh(nx, ny, domain, std::move(nodes), std::move(triangles));
}

StructuredTriMesh refine(const StructuredTriMesh& mesh) {
    const int nx = 2 * mesh.nx();
    const int ny = 2 * mesh.ny();
    const Rect& dom = mesh.domain();
    const double dx = dom.width() / nx;
    const double dy = dom.height() / ny;

    std::vector<Point> nodes(static_cast<std::size_t>(nx + 1) * (ny + 1));
    std::vector<char> filled(nodes.size(), 0);
    const auto slot_of = [&](const Point& p) {
        const int i = static_cast<int>(std::lround((p.x - dom.ax) / dx));
        const int j = static_cast<int>(std::lround((p.y - dom.ay) / dy));
        return j * (nx + 1) + i;
    };
    const auto place = [&](const Point& p) {
        const int s = slot_of(p);
        if (!filled[s]) {
            nodes[s] = p;
            filled[s] = 1;
        }
        return s;
    };

    // Parent vertices first so they keep their exact coordinates.
    std::vector<int> parent_slot(mesh.num_nodes());
    for (int v = 0; v < mesh.num_nodes(); ++v) parent_slot[v] = place(mesh.node(v));

    std::map<std::pair<int, int>, int> midpoint;
    const auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const Point& pa = mesh.node(a);
        const Point& pb = mesh.node(b);
        const int s = place({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
        midpoint.emplace(key, s);
        return s;
    };

    std::vector<Triangle> triangles;
    triangles.reserve(4 * static_cast<std::size_t>(mesh.num_triangles()));
    for (const auto& t : mesh.triangles()) {
        const int a = parent_slot[t[0]], b = parent_slot[t[1]], c = parent_slot[t[2]];
        const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        triangles.push_back({a, ab, ca});
        triangles.push_back({ab, b, bc});
        triangles.push_back({ca, bc, c});
        triangles.push_back({ab, bc, ca});
    }
    if (std::find(filled.begin(), filled.end(), 0) != filled.end()) {
        throw std::logic_error("refine: input mesh does not cover its structured grid");
    }
    return StructuredTriMesh(nx, ny, dom, std::move(nodes), std::move(triangles));
}

std::vector<int> boundary_nodes(const StructuredTriMesh& mesh, Side side) {
    std::vector<int> out;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (mesh.has_tag(i, side)) out.push_back(i);
    }
    return out;
}

int nearest_node(const StructuredTriMesh& mesh, Point p) {
    int best = 0;
    double best_d2 = INFINITY;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const double ddx = mesh.node(i).x - p.x;
        const double ddy = mesh.node(i).y - p.y;
        const double d2 = ddx * ddx + ddy * ddy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

}  // namespace biot
