#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "biot/biot_system.hpp"
#include "biot/krylov.hpp"
#include "biot/preconditioner.hpp"

namespace biot {

struct TimeGrid {
    double tau = 0.0;
    int n_time = 0;

    double T() const { return tau * n_time; }
    double time(int n) const { return tau * n; }

    /// Throws std::invalid_argument unless tau > 0 and n_time >= 1.
    void validate() const;
    /// n_time = round(T / tau); rejects T that is not a multiple of tau within 1e-9 relative.
    static TimeGrid from_final_time(double tau, double T);
};

/**
 * Work split of the inverted method: each visit of a time step runs n_iter
 * iterations and every step is visited n_sweeps times.
 */
struct SweepSchedule {
    int n_iter = 1;
    int n_sweeps = 1;
    int n_threads = 1;

    int N_iter() const { return n_iter * n_sweeps; }
    void validate() const;
    /// One sweep per worker thread.
    static SweepSchedule parallel(int n_threads, int n_iter);
};

struct TimeLoopConfig {
    /// Tolerance, iteration cap and restart for the solves. Mode and n_iter are set by each engine.
    KrylovConfig krylov;
    /// Inverted engines: stop a visit early once the tolerance is reached (capped at n_iter)
    /// instead of always running exactly n_iter iterations.
    bool matching_mode = false;
    /// Pipeline watchdog: a stage taking longer than this many seconds is flagged. <= 0 disables it.
    double stage_time_budget = 0.0;
    /// Keep every X^n in the result. Without it only the sink sees the solutions.
    bool store_states = true;
    /// Sequential engine: throw ConvergenceError when a step misses the tolerance.
    /// When false the step keeps its last iterate and the report says so.
    bool require_convergence = true;
};

/// Receives finalized step solutions (reduced vectors) in increasing n.
using StepSink = std::function<void(int n, std::span<const double> x)>;

struct TimeLoopResult {
    /// X^0 .. X^{n_time} in reduced form when stored; empty otherwise.
    std::vector<Vector> states;
    /// Report of the last visit to each step, index n - 1. Its residual uses the final X^{n-1}.
    std::vector<SolveReport> reports;
    bool watchdog_tripped = false;
    int watchdog_stage = -1;

    double max_final_residual() const;
    int max_iterations() const;
    double mean_iterations() const;
    /// Steps (1-based) whose final relative residual exceeds tol.
    std::vector<int> steps_above(double tol) const;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(int step, double residual);
    int step() const { return step_; }
    double residual() const { return residual_; }

private:
    int step_;
    double residual_;
};

/// Constrained loads f^1 .. f^{n_time}, computed once and shared read-only.
class LoadCache {
public:
    LoadCache(const BiotSystem& system, const TimeGrid& grid);
    int n_time() const { return static_cast<int>(loads_.size()); }
    std::span<const double> at(int n) const { return loads_.at(n - 1); }

private:
    std::vector<Vector> loads_;
};

/// b = A' x_prev + f.
void form_rhs(const BiotSystem& system, std::span<const double> x_prev, std::span<const double> f,
              std::span<double> b);

/// Backward Euler: every step solved from a zero guess to cfg.krylov.tol. Throws ConvergenceError.
TimeLoopResult run_sequential(const BiotSystem& system, const Preconditioner& precond, const TimeGrid& grid,
                              const TimeLoopConfig& cfg, const StepSink& sink = {});

/**
 * Sweeps outside, time steps inside; all states live in place and each visit
 * warm-starts from the previous sweep. Does not throw on residuals; check the
 * reports.
 */
TimeLoopResult run_inverted_serial(const BiotSystem& system, const Preconditioner& precond, const TimeGrid& grid,
                                   const SweepSchedule& schedule, const TimeLoopConfig& cfg,
                                   const StepSink& sink = {});

/**
 * Wavefront pipeline with one sweep per worker. Worker t handles step s - t
 * at stage s; the states live in a ring of n_threads slots. Each stage has a
 * read phase (all workers form their right-hand sides) and a solve phase,
 * separated by a barrier. The sink is called from the last worker.
 */
TimeLoopResult run_pipeline_parallel(const BiotSystem& system, const Preconditioner& precond, const TimeGrid& grid,
                                     const SweepSchedule& schedule, const TimeLoopConfig& cfg,
                                     const StepSink& sink = {});

/// Smallest multiple of n_threads that is >= max_observed (and >= n_threads).
int round_iteration_budget(int max_observed, int n_threads);

/// Runs the sequential engine for the first pilot_steps steps and derives a schedule for n_threads workers.
SweepSchedule calibrate_iteration_budget(const BiotSystem& system, const Preconditioner& precond,
                                         const TimeGrid& grid, const TimeLoopConfig& cfg, int pilot_steps,
                                         int n_threads);

/**
 * Smallest n_iter >= start.n_iter for which the inverted method meets
 * cfg.krylov.tol on every pilot step (found by doubling, then bisection). The pilot runs serially;
 * the pipeline produces the same iterates. Throws ConvergenceError if
 * max_n_iter is not enough.
 */
SweepSchedule refine_schedule_to_tolerance(const BiotSystem& system, const Preconditioner& precond,
                                           const TimeGrid& grid, const TimeLoopConfig& cfg, int pilot_steps,
                                           const SweepSchedule& start, int max_n_iter = 200);

}  // namespace biot
