#include "biot/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace biot {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

BenchmarkCase trig_case() {
    BenchmarkCase c;
    c.name = "trig";
    c.domain = unit_square;
    c.params = MaterialParams::make(1.0, 0.3, 1.0, 1.0);
    const double alpha = c.params.alpha;
    const double lambda = c.params.lambda;
    const double mu = c.params.mu;
    const double K = c.params.K;

    const auto phi = [](double x, double y, double t) {
        return std::cos(t) * std::cos(3 * pi * x) * std::cos(3 * pi * y);
    };
    c.body_force = [=](double x, double y, double t) -> std::array<double, 2> {
        const double sx = std::sin(3 * pi * x), cx = std::cos(3 * pi * x);
        const double sy = std::sin(3 * pi * y), cy = std::cos(3 * pi * y);
        const double f1 = alpha * sx * cy - 3 * pi * (lambda + 3 * mu) * cx * cy + 3 * pi * (lambda + mu) * sx * sy;
        const double f2 = alpha * cx * sy - 3 * pi * (lambda + 3 * mu) * cx * cy + 3 * pi * (lambda + mu) * sx * sy;
        return {-3 * pi * std::cos(t) * f1, -3 * pi * std::cos(t) * f2};
    };
    c.source = [=](double x, double y, double t) {
        const double sx = std::sin(3 * pi * x), cx = std::cos(3 * pi * x);
        const double sy = std::sin(3 * pi * y), cy = std::cos(3 * pi * y);
        // alpha d/dt(div u) - K lap p for the exact fields.
        return 3 * alpha * pi * std::sin(t) * (sx * cy + cx * sy) + 18 * K * pi * pi * std::cos(t) * cx * cy;
    };
    for (Side s : all_sides) {
        c.on(s) = SideConditions{FieldBc::dirichlet(phi), FieldBc::dirichlet(phi), FieldBc::dirichlet(phi)};
    }
    c.initial_displacement = [=](double x, double y, double) -> std::array<double, 2> {
        return {phi(x, y, 0.0), phi(x, y, 0.0)};
    };
    c.initial_pressure = [=](double x, double y, double) { return phi(x, y, 0.0); };
    c.exact = ExactSolution{
        [=](double x, double y, double t) -> std::array<double, 2> { return {phi(x, y, t), phi(x, y, t)}; },
        phi,
    };
    return c;
}

BenchmarkCase barry_mercer_case(const BarryMercerOptions& options) {
    BenchmarkCase c;
    c.name = "barry-mercer";
    c.domain = unit_square;
    c.params = MaterialParams::make(1e5, 0.1, 1.0, options.K);
    c.stabilized = options.stabilized;

    // Drained everywhere; the displacement component tangential to each side vanishes.
    c.on(Side::Left) = {FieldBc::natural(), FieldBc::zero(), FieldBc::zero()};
    c.on(Side::Right) = {FieldBc::natural(), FieldBc::zero(), FieldBc::zero()};
    c.on(Side::Bottom) = {FieldBc::zero(), FieldBc::natural(), FieldBc::zero()};
    c.on(Side::Top) = {FieldBc::zero(), FieldBc::natural(), FieldBc::zero()};

    const double freq = barry_mercer_frequency(c);
    c.point_sources.push_back({{0.25, 0.25}, [freq](double t) { return -0.5 * std::sin(freq * t); }});
    c.initial_displacement = [](double, double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
    c.initial_pressure = [](double, double, double) { return 0.0; };
    return c;
}

double barry_mercer_frequency(const BenchmarkCase& bcase) {
    const auto& p = bcase.params;
    return (p.lambda + 2.0 * p.mu) * p.K / (bcase.domain.width() * bcase.domain.height());
}

double undrained_poisson(double nu, double skempton) {
    const double s = skempton * (1.0 - 2.0 * nu);
    return (3.0 * nu + s) / (3.0 - s);
}

BenchmarkCase mandel_case(const MandelData& data) {
    BenchmarkCase c;
    c.name = "mandel";
    c.domain = Rect{0.0, data.a, 0.0, data.b};
    c.params = MaterialParams::make(1e4, 0.0, 1.0, 1e-6);

    c.on(Side::Right) = {FieldBc::natural(), FieldBc::natural(), FieldBc::zero()};
    c.on(Side::Left) = {FieldBc::zero(), FieldBc::natural(), FieldBc::natural()};
    c.on(Side::Bottom) = {FieldBc::natural(), FieldBc::zero(), FieldBc::natural()};
    c.on(Side::Top) = {FieldBc::natural(), FieldBc::natural(), FieldBc::natural()};
    c.plate = TiedPlate{Side::Top, 1, -data.F};

    const double nu_u = undrained_poisson(c.params.nu, data.skempton);
    const double G = c.params.mu;
    const double F = data.F, B = data.skempton, a = data.a;
    c.initial_pressure = [=](double, double, double) { return F * B * (1.0 + nu_u) / (3.0 * a); };
    c.initial_displacement = [=](double x, double y, double) -> std::array<double, 2> {
        return {F * nu_u * x / (2.0 * G), -F * B * (1.0 - nu_u) * y / (2.0 * G * a)};
    };
    return c;
}

BenchmarkCase zero_forcing_case() {
    BenchmarkCase c;
    c.name = "zero";
    c.params = MaterialParams::make(1.0, 0.3, 1.0, 1.0);
    for (Side s : all_sides) c.on(s) = {FieldBc::zero(), FieldBc::zero(), FieldBc::zero()};
    c.initial_displacement = [](double, double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
    c.initial_pressure = [](double, double, double) { return 0.0; };
    c.exact = ExactSolution{[](double, double, double) -> std::array<double, 2> { return {0.0, 0.0}; },
                            [](double, double, double) { return 0.0; }};
    return c;
}

namespace {

template <class Diff>
double midpoint_l2(const StructuredTriMesh& mesh, Diff&& diff_at) {
    double sum = 0.0;
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto& v = mesh.triangles()[tri];
        const double area = std::abs(mesh.signed_area(tri));
        double local = 0.0;
        for (int e = 0; e < 3; ++e) {
            const int i = v[e], j = v[(e + 1) % 3];
            local += diff_at(i, j);
        }
        sum += area * local / 3.0;
    }
    return std::sqrt(sum);
}

}  // namespace

double l2_error(const StructuredTriMesh& mesh, std::span<const double> numeric, const ScalarField& exact, double t) {
    if (static_cast<int>(numeric.size()) != mesh.num_nodes()) {
        throw std::invalid_argument("l2_error: field size does not match mesh");
    }
    return midpoint_l2(mesh, [&](int i, int j) {
        const Point& a = mesh.node(i);
        const Point& b = mesh.node(j);
        const double d = 0.5 * (numeric[i] + numeric[j]) - exact(0.5 * (a.x + b.x), 0.5 * (a.y + b.y), t);
        return d * d;
    });
}

double l2_error_displacement(const StructuredTriMesh& mesh, std::span<const double> numeric, const VectorField& exact,
                             double t) {
    if (static_cast<int>(numeric.size()) != 2 * mesh.num_nodes()) {
        throw std::invalid_argument("l2_error_displacement: field size does not match mesh");
    }
    return midpoint_l2(mesh, [&](int i, int j) {
        const Point& a = mesh.node(i);
        const Point& b = mesh.node(j);
        const auto ue = exact(0.5 * (a.x + b.x), 0.5 * (a.y + b.y), t);
        const double dx = 0.5 * (numeric[2 * i] + numeric[2 * j]) - ue[0];
        const double dy = 0.5 * (numeric[2 * i + 1] + numeric[2 * j + 1]) - ue[1];
        return dx * dx + dy * dy;
    });
}

double l2_difference(const StructuredTriMesh& mesh, std::span<const double> a, std::span<const double> b) {
    if (static_cast<int>(a.size()) != mesh.num_nodes() || static_cast<int>(b.size()) != mesh.num_nodes()) {
        throw std::invalid_argument("l2_difference: field size does not match mesh");
    }
    return midpoint_l2(mesh, [&](int i, int j) {
        const double d = 0.5 * ((a[i] - b[i]) + (a[j] - b[j]));
        return d * d;
    });
}

double convergence_order(std::span<const std::pair<double, double>> step_error) {
    if (step_error.size() < 2) throw std::invalid_argument("convergence_order: need at least two levels");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [step, err] : step_error) {
        if (!(step > 0.0) || !(err > 0.0)) {
            throw std::invalid_argument("convergence_order: steps and errors must be positive");
        }
        const double lx = std::log(step), ly = std::log(err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(step_error.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("convergence_order: steps must differ");
    return (n * sxy - sx * sy) / denom;
}

CryerIndicator mandel_cryer_indicator(std::span<const std::pair<double, double>> history) {
    if (history.empty()) throw std::invalid_argument("mandel_cryer_indicator: empty history");
    CryerIndicator ind;
    ind.initial_value = history.front().second;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i].second > history[peak].second) peak = i;
    }
    ind.peak_time = history[peak].first;
    ind.peak_value = history[peak].second;
    const double slack = 1e-12 * std::abs(ind.peak_value);
    ind.decays_after_peak = true;
    for (std::size_t i = peak + 1; i < history.size(); ++i) {
        if (history[i].second > history[i - 1].second + slack) {
            ind.decays_after_peak = false;
            break;
        }
    }
    ind.present = ind.peak_value > ind.initial_value && peak > 0 && ind.decays_after_peak;
    return ind;
}

}  // namespace biot
