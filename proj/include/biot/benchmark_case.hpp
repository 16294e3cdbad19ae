#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "biot/material.hpp"
#include "biot/mesh.hpp"

namespace biot {

using ScalarField = std::function<double(double x, double y, double t)>;
using VectorField = std::function<std::array<double, 2>(double x, double y, double t)>;

/// Condition on one field component along one side. Natural means zero traction or zero flux.
struct FieldBc {
    enum class Kind { Natural, Dirichlet } kind = Kind::Natural;
    ScalarField value;

    static FieldBc natural() { return {}; }
    static FieldBc dirichlet(ScalarField v) { return {Kind::Dirichlet, std::move(v)}; }
    static FieldBc zero() {
        return dirichlet([](double, double, double) { return 0.0; });
    }
    bool is_dirichlet() const { return kind == Kind::Dirichlet; }
};

struct SideConditions {
    FieldBc ux;
    FieldBc uy;
    FieldBc p;
};

/**
 * Rigid plate: every displacement component `component` on `side` is tied to
 * a single master unknown that carries the resultant force `resultant`.
 */
struct TiedPlate {
    Side side = Side::Top;
    int component = 1;
    double resultant = 0.0;
};

struct PointSource {
    Point location;
    std::function<double(double t)> weight;
};

struct ExactSolution {
    VectorField u;
    ScalarField p;
};

struct BenchmarkCase {
    std::string name;
    Rect domain = unit_square;
    MaterialParams params;
    /// Indexed Left, Right, Bottom, Top.
    std::array<SideConditions, 4> sides;
    VectorField body_force;
    ScalarField source;
    std::vector<PointSource> point_sources;
    VectorField initial_displacement;
    ScalarField initial_pressure;
    std::optional<ExactSolution> exact;
    std::optional<TiedPlate> plate;
    /// Assemble with the pressure stabilization term.
    bool stabilized = true;

    static constexpr int side_index(Side s) {
        switch (s) {
        case Side::Left: return 0;
        case Side::Right: return 1;
        case Side::Bottom: return 2;
        case Side::Top: return 3;
        }
        return 0;
    }
    SideConditions& on(Side s) { return sides[side_index(s)]; }
    const SideConditions& on(Side s) const { return sides[side_index(s)]; }
};

}  // namespace biot
