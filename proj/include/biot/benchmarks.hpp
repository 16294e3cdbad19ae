#pragma once

#include <span>
#include <utility>
#include <vector>

#include "biot/benchmark_case.hpp"
#include "biot/mesh.hpp"

namespace biot {

/**
 * Smooth manufactured problem on the unit square with
 * u1 = u2 = p = cos(t) cos(3 pi x) cos(3 pi y), E = 1, nu = 0.3, alpha = 1,
 * K = 1 and Dirichlet data on every side.
 */
BenchmarkCase trig_case();

struct BarryMercerOptions {
    double K = 1e-2;
    bool stabilized = true;
};

/// Oscillating point source at (1/4, 1/4) in a drained unit square.
BenchmarkCase barry_mercer_case(const BarryMercerOptions& options = {});

/// Forcing frequency (lambda + 2 mu) K / (a b) of the point source.
double barry_mercer_frequency(const BenchmarkCase& bcase);

struct MandelData {
    double F = 1.0;       // plate load on the quarter domain
    double skempton = 1.0;
    double a = 1.0;
    double b = 1.0;
};

/// Quarter-domain Mandel consolidation problem with a rigid loaded top plate.
BenchmarkCase mandel_case(const MandelData& data = {});

/// Undrained Poisson ratio (3 nu + B (1 - 2 nu)) / (3 - B (1 - 2 nu)).
double undrained_poisson(double nu, double skempton);

/// Homogeneous data and zero forcing; the solution is identically zero.
BenchmarkCase zero_forcing_case();

/**
 * L2 norm of (numeric - exact) for a nodal P1 field, integrated with the
 * edge-midpoint rule (exact for quadratics) on every triangle.
 */
double l2_error(const StructuredTriMesh& mesh, std::span<const double> numeric, const ScalarField& exact, double t);

/// L2 error of an interleaved (ux, uy) nodal displacement.
double l2_error_displacement(const StructuredTriMesh& mesh, std::span<const double> numeric, const VectorField& exact,
                             double t);

/// L2 norm of the difference of two nodal P1 fields.
double l2_difference(const StructuredTriMesh& mesh, std::span<const double> a, std::span<const double> b);

/// Least-squares slope of log(error) against log(step). Needs two or more positive entries.
double convergence_order(std::span<const std::pair<double, double>> step_error);

struct CryerIndicator {
    double peak_time = 0.0;
    double peak_value = 0.0;
    double initial_value = 0.0;
    bool decays_after_peak = false;
    /// Peak strictly above the initial value followed by monotone decay.
    bool present = false;
};

/// Analyze a (time, pressure) history at a probe point.
CryerIndicator mandel_cryer_indicator(std::span<const std::pair<double, double>> history);

}  // namespace biot
