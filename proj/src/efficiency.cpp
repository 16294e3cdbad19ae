#include "biot/efficiency.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <vector>

namespace biot {

void EfficiencyModel::validate() const {
    if (!(T_b >= 0.0) || !(t_iter >= 0.0) || T_b + t_iter <= 0.0) {
        throw std::invalid_argument("EfficiencyModel: timings must be non-negative and not both zero");
    }
    if (N_iter < 1 || n_iter < 1 || N_thread < 1 || N_time < 1) {
        throw std::invalid_argument("EfficiencyModel: counts must be positive");
    }
}

EfficiencyEstimate theoretical_efficiency(const EfficiencyModel& m) {
    m.validate();
    EfficiencyEstimate e;
    const double Nt = m.N_time, Nth = m.N_thread, Ni = m.N_iter;
    e.E1 = Nt / (Nth + Nt - 1.0);
    // Sharing T_b / N_iter between both terms keeps E2 <= 1 under rounding.
    const double share = m.T_b / Ni;
    e.E2 = (share + m.t_iter) / (Nth * share + m.t_iter);
    e.E = e.E1 * e.E2;
    return e;
}

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

KernelTimings measure_kernel_timings(const BiotSystem& system, const Preconditioner& precond, double tau,
                                     const KrylovConfig& krylov, int repetitions) {
    if (repetitions < 1) throw std::invalid_argument("measure_kernel_timings: repetitions must be >= 1");
    const int n = system.step_matrix().rows();
    const Vector x0 = system.initial_state();
    const Vector f = system.step_load(tau);
    Vector b(n), x(n);
    GmresWorkspace ws;
    KrylovConfig one = krylov;
    one.mode = KrylovMode::FixedIterations;
    one.n_iter = 1;

    std::vector<double> rhs_times, iter_times;
    rhs_times.reserve(repetitions);
    iter_times.reserve(repetitions);
    for (int r = 0; r < repetitions; ++r) {
        const auto t0 = Clock::now();
        form_rhs(system, x0, f, b);
        const auto t1 = Clock::now();
        std::fill(x.begin(), x.end(), 0.0);
        const auto t2 = Clock::now();
        gmres(system.step_matrix(), precond, b, x, one, &ws);
        const auto t3 = Clock::now();
        rhs_times.push_back(std::chrono::duration<double>(t1 - t0).count());
        iter_times.push_back(std::chrono::duration<double>(t3 - t2).count());
    }
    return {median(rhs_times), median(iter_times)};
}

}  // namespace biot
