#pragma once

#include "biot/biot_system.hpp"
#include "biot/preconditioner.hpp"
#include "biot/timeloop.hpp"

namespace biot {

struct EfficiencyModel {
    double T_b = 0.0;     // seconds to form one right-hand side
    double t_iter = 0.0;  // seconds per preconditioned iteration
    int N_iter = 1;
    int n_iter = 1;
    int N_thread = 1;
    int N_time = 1;

    void validate() const;
};

struct EfficiencyEstimate {
    double E1 = 1.0;
    double E2 = 1.0;
    double E = 1.0;
};

/**
 * E1 = N_time / (N_thread + N_time - 1)
 * E2 = (T_b / N_iter + t_iter) / ((N_thread / N_iter) T_b + t_iter)
 * E  = E1 E2
 */
EfficiencyEstimate theoretical_efficiency(const EfficiencyModel& model);

struct KernelTimings {
    double T_b = 0.0;
    double t_iter = 0.0;
};

/// Medians over `repetitions` timed right-hand-side formations and single GMRES iterations on the given system.
KernelTimings measure_kernel_timings(const BiotSystem& system, const Preconditioner& precond, double tau,
                                     const KrylovConfig& krylov, int repetitions = 20);

}  // namespace biot
