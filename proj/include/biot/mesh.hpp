#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace biot {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned rectangle [ax, bx] x [ay, by].
struct Rect {
    double ax = 0.0;
    double bx = 1.0;
    double ay = 0.0;
    double by = 1.0;

    double width() const { return bx - ax; }
    double height() const { return by - ay; }
    double area() const { return width() * height(); }
    bool contains(Point p, double eps = 0.0) const;
};

inline constexpr Rect unit_square{0.0, 1.0, 0.0, 1.0};

enum class Side : std::uint8_t { Left = 1, Right = 2, Bottom = 4, Top = 8 };

inline constexpr std::array<Side, 4> all_sides{Side::Left, Side::Right, Side::Bottom, Side::Top};

const char* to_string(Side side);

using Triangle = std::array<int, 3>;

/**
 * Uniform triangulation of a rectangle. Every grid cell is split along its
 * bottom-left to top-right diagonal; nodes are numbered row-major (y outer,
 * x inner). Immutable after construction.
 */
class StructuredTriMesh {
public:
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const Rect& domain() const { return domain_; }

    std::span<const Point> nodes() const { return nodes_; }
    std::span<const Triangle> triangles() const { return triangles_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    const Point& node(int i) const { return nodes_[i]; }

    /// Larger of the two cell edge lengths along the axes.
    double h() const;
    double dx() const { return domain_.width() / nx_; }
    double dy() const { return domain_.height() / ny_; }

    /// Signed area, positive for counter-clockwise triangles.
    double signed_area(int triangle) const;

    std::uint8_t tags(int node) const { return tags_[node]; }
    bool has_tag(int node, Side side) const {
        return (tags_[node] & static_cast<std::uint8_t>(side)) != 0;
    }
    bool on_boundary(int node) const { return tags_[node] != 0; }

    /// Index of grid node (i, j), 0 <= i <= nx, 0 <= j <= ny.
    int grid_node(int i, int j) const { return j * (nx_ + 1) + i; }

    /// Plain-text dump: "nodes N", N lines "x y", "triangles M", M lines "i j k".
    void write_text(std::ostream& out) const;

private:
    friend StructuredTriMesh build_uniform_mesh(int nx, int ny, const Rect& domain);
    friend StructuredTriMesh refine(const StructuredTriMesh& mesh);

    StructuredTriMesh(int nx, int ny, const Rect& domain, std::vector<Point> nodes,
                      std::vector<Triangle> triangles);

    int nx_ = 0;
    int ny_ = 0;
    Rect domain_;
    std::vector<Point> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<std::uint8_t> tags_;
};

StructuredTriMesh build_uniform_mesh(int nx, int ny, const Rect& domain = unit_square);

/// Midpoint refinement: each triangle is split into four by joining edge midpoints.
StructuredTriMesh refine(const StructuredTriMesh& mesh);

/// Sorted indices of the nodes carrying `side`.
std::vector<int> boundary_nodes(const StructuredTriMesh& mesh, Side side);

/// Node closest to `p`; ties resolve to the lowest index.
int nearest_node(const StructuredTriMesh& mesh, Point p);

}  // namespace biot
