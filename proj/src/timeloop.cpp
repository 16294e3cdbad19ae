#include "biot/timeloop.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace biot {

void TimeGrid::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("TimeGrid: tau must be positive");
    if (n_time < 1) throw std::invalid_argument("TimeGrid: n_time must be >= 1");
}

TimeGrid TimeGrid::from_final_time(double tau, double T) {
    if (!(tau > 0.0) || !(T > 0.0)) throw std::invalid_argument("TimeGrid: tau and T must be positive");
    const double ratio = T / tau;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument("TimeGrid: T is not a whole number of steps");
    }
    return {tau, static_cast<int>(rounded)};
}

void SweepSchedule::validate() const {
    if (n_iter < 1) throw std::invalid_argument("SweepSchedule: n_iter must be >= 1");
    if (n_sweeps < 1) throw std::invalid_argument("SweepSchedule: n_sweeps must be >= 1");
    if (n_threads < 1) throw std::invalid_argument("SweepSchedule: n_threads must be >= 1");
}

SweepSchedule SweepSchedule::parallel(int n_threads, int n_iter) { return {n_iter, n_threads, n_threads}; }

double TimeLoopResult::max_final_residual() const {
    double m = 0.0;
    for (const auto& r : reports) m = std::max(m, r.final_relative_residual);
    return m;
}

int TimeLoopResult::max_iterations() const {
    int m = 0;
    for (const auto& r : reports) m = std::max(m, r.iterations_used);
    return m;
}

double TimeLoopResult::mean_iterations() const {
    if (reports.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : reports) s += r.iterations_used;
    return s / static_cast<double>(reports.size());
}

std::vector<int> TimeLoopResult::steps_above(double tol) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (!(reports[i].final_relative_residual <= tol)) out.push_back(static_cast<int>(i) + 1);
    }
    return out;
}

ConvergenceError::ConvergenceError(int step, double residual)
    : std::runtime_error("solver did not reach tolerance at step " + std::to_string(step) +
                         " (relative residual " + std::to_string(residual) + ")"),
      step_(step),
      residual_(residual) {}

LoadCache::LoadCache(const BiotSystem& system, const TimeGrid& grid) {
    grid.validate();
    loads_.reserve(grid.n_time);
    for (int n = 1; n <= grid.n_time; ++n) loads_.push_back(system.step_load(grid.time(n)));
}

void form_rhs(const BiotSystem& system, std::span<const double> x_prev, std::span<const double> f,
              std::span<double> b) {
    std::copy(f.begin(), f.end(), b.begin());
    system.history_matrix().multiply_add(1.0, x_prev, b);
}

namespace {

void check_sizes(const BiotSystem& system, const Preconditioner& precond) {
    if (precond.size() != system.step_matrix().rows()) {
        throw std::invalid_argument("time loop: preconditioner size does not match the system");
    }
}

KrylovConfig visit_config(const TimeLoopConfig& cfg, int n_iter) {
    KrylovConfig k = cfg.krylov;
    if (cfg.matching_mode) {
        k.mode = KrylovMode::ToTolerance;
        k.max_iters = n_iter;
    } else {
        k.mode = KrylovMode::FixedIterations;
        k.n_iter = n_iter;
    }
    return k;
}

}  // namespace

TimeLoopResult run_sequential(const BiotSystem& system, const Preconditioner& precond, const TimeGrid& grid,
                              const TimeLoopConfig& cfg, const StepSink& sink) {
    grid.validate();
    check_sizes(system, precond);
    KrylovConfig k = cfg.krylov;
    k.mode = KrylovMode::ToTolerance;
    k.validate();

    const LoadCache loads(system, grid);
    const int n = system.step_matrix().rows();
    TimeLoopResult result;
    result.reports.reserve(grid.n_time);

    Vector prev = system.initial_state();
    Vector cur(n), b(n);
    GmresWorkspace ws;
    if (cfg.store_states) result.states.push_back(prev);
    for (int step = 1; step <= grid.n_time; ++step) {
        form_rhs(system, prev, loads.at(step), b);
        std::fill(cur.begin(), cur.end(), 0.0);
        SolveReport rep = gmres(system.step_matrix(), precond, b, cur, k, &ws);
        if (!rep.converged && cfg.require_convergence) throw ConvergenceError(step, rep.final_relative_residual);
        result.reports.push_back(std::move(rep));
        if (sink) sink(step, cur);
        if (cfg.store_states) result.states.push_back(cur);
        std::swap(prev, cur);
    }
    return result;
}

TimeLoopResult run_inverted_serial(const BiotSystem& system, const Preconditioner& precond, const TimeGrid& grid,
                                   const SweepSchedule& schedule, const TimeLoopConfig& cfg, const StepSink& sink) {
    grid.validate();
    schedule.validate();
    check_sizes(system, precond);
    const KrylovConfig k = visit_config(cfg, schedule.n_iter);
    k.validate();

    const LoadCache loads(system, grid);
    const int n = system.step_matrix().rows();
    std::vector<Vector> X(grid.n_time + 1, Vector(n, 0.0));
    X[0] = system.initial_state();
    Vector b(n);
    GmresWorkspace ws;

    TimeLoopResult result;
    result.reports.resize(grid.n_time);
    for (int m = 1; m <= schedule.n_sweeps; ++m) {
        for (int step = 1; step <= grid.n_time; ++step) {
            form_rhs(system, X[step - 1], loads.at(step), b);
            SolveReport rep = gmres(system.step_matrix(), precond, b, X[step], k, &ws);
            if (m == schedule.n_sweeps) result.reports[step - 1] = std::move(rep);
        }
    }
    if (sink) {
        for (int step = 1; step <= grid.n_time; ++step) sink(step, X[step]);
    }
    if (cfg.store_states) result.states = std::move(X);
    return result;
}

namespace {

/// Tracks stage completions and flags a stage that outlives the budget.
class Watchdog {
public:
    explicit Watchdog(double budget_seconds) : budget_(budget_seconds) {
        if (budget_ > 0.0) thread_ = std::thread([this] { watch(); });
    }
    ~Watchdog() { stop(); }

    void stage_done(int stage) {
        {
            std::lock_guard lock(mu_);
            stage_ = stage;
            ++ticks_;
        }
        cv_.notify_all();
    }

    void stop() {
        {
            std::lock_guard lock(mu_);
            done_ = true;
        }
        cv_.notify_all();
        if (thread_.joinable()) thread_.join();
    }

    bool tripped() const { return tripped_.load(); }
    int tripped_stage() const { return tripped_stage_.load(); }

private:
    void watch() {
        const auto limit = std::chrono::duration<double>(budget_);
        std::unique_lock lock(mu_);
        while (!done_) {
            const long seen = ticks_;
            const bool advanced = cv_.wait_for(lock, limit, [&] { return done_ || ticks_ != seen; });
            if (!advanced && !tripped_.load()) {
                tripped_stage_.store(stage_ + 1);
                tripped_.store(true);
            }
        }
    }

    double budget_;
    std::mutex mu_;
    std::condition_variable cv_;
    long ticks_ = 0;
    int stage_ = 0;
    bool done_ = false;
    std::atomic<bool> tripped_{false};
    std::atomic<int> tripped_stage_{-1};
    std::thread thread_;
};

struct StageClock {
    Watchdog* watchdog;
    int* stage;
    void operator()() noexcept {
        // Runs once per barrier phase; two phases make one stage.
        ++*stage;
        if (*stage % 2 == 0) watchdog->stage_done(*stage / 2);
    }
};

}  // namespace

TimeLoopResult run_pipeline_parallel(const BiotSystem& system, const Preconditioner& precond, const TimeGrid& grid,
                                     const SweepSchedule& schedule, const TimeLoopConfig& cfg, const StepSink& sink) {
    grid.validate();
    schedule.validate();
    check_sizes(system, precond);
    if (schedule.n_sweeps != schedule.n_threads) {
        throw std::invalid_argument("run_pipeline_parallel: needs one sweep per thread");
    }
    const KrylovConfig k = visit_config(cfg, schedule.n_iter);
    k.validate();

    const LoadCache loads(system, grid);
    const int n = system.step_matrix().rows();
    const int T = schedule.n_threads;
    const int n_stages = grid.n_time + T - 1;
    const Vector x0 = system.initial_state();
    std::vector<Vector> slots(T, Vector(n, 0.0));
    const auto slot = [&](int step) -> Vector& { return slots[step % T]; };

    TimeLoopResult result;
    result.reports.resize(grid.n_time);
    if (cfg.store_states) {
        result.states.assign(grid.n_time + 1, Vector());
        result.states[0] = x0;
    }

    Watchdog watchdog(cfg.stage_time_budget);
    int phase_counter = 0;
    std::barrier sync(T, StageClock{&watchdog, &phase_counter});
    std::atomic<bool> abort{false};
    std::exception_ptr failure;
    std::mutex failure_mu;

    const auto worker = [&](int t) {
        Vector b(n);
        GmresWorkspace ws;
        const bool last = t == T - 1;
        for (int s = 1; s <= n_stages; ++s) {
            const int step = s - t;
            const bool active = step >= 1 && step <= grid.n_time;
            if (active && !abort.load()) {
                try {
                    const Vector& prev = step == 1 ? x0 : slot(step - 1);
                    form_rhs(system, prev, loads.at(step), b);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    abort.store(true);
                }
            }
            sync.arrive_and_wait();
            if (active && !abort.load()) {
                try {
                    Vector& x = slot(step);
                    if (t == 0) std::fill(x.begin(), x.end(), 0.0);
                    SolveReport rep = gmres(system.step_matrix(), precond, b, x, k, &ws);
                    if (last) {
                        result.reports[step - 1] = std::move(rep);
                        if (sink) sink(step, x);
                        if (cfg.store_states) result.states[step] = x;
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    abort.store(true);
                }
            }
            sync.arrive_and_wait();
        }
    };

    {
        std::vector<std::jthread> workers;
        workers.reserve(T);
        for (int t = 0; t < T; ++t) workers.emplace_back(worker, t);
    }
    watchdog.stop();
    result.watchdog_tripped = watchdog.tripped();
    result.watchdog_stage = watchdog.tripped_stage();
    if (failure) std::rethrow_exception(failure);
    return result;
}

int round_iteration_budget(int max_observed, int n_threads) {
    if (n_threads < 1) throw std::invalid_argument("round_iteration_budget: n_threads must be >= 1");
    const int base = std::max(max_observed, 1);
    return ((base + n_threads - 1) / n_threads) * n_threads;
}

SweepSchedule calibrate_iteration_budget(const BiotSystem& system, const Preconditioner& precond,
                                         const TimeGrid& grid, const TimeLoopConfig& cfg, int pilot_steps,
                                         int n_threads) {
    if (pilot_steps < 1) throw std::invalid_argument("calibrate_iteration_budget: pilot_steps must be >= 1");
    const TimeGrid pilot{grid.tau, std::min(pilot_steps, grid.n_time)};
    TimeLoopConfig pilot_cfg = cfg;
    pilot_cfg.store_states = false;
    const TimeLoopResult r = run_sequential(system, precond, pilot, pilot_cfg);
    const int N_iter = round_iteration_budget(r.max_iterations(), n_threads);
    return SweepSchedule::parallel(n_threads, N_iter / n_threads);
}

SweepSchedule refine_schedule_to_tolerance(const BiotSystem& system, const Preconditioner& precond,
                                           const TimeGrid& grid, const TimeLoopConfig& cfg, int pilot_steps,
                                           const SweepSchedule& start, int max_n_iter) {
    if (pilot_steps < 1) throw std::invalid_argument("refine_schedule_to_tolerance: pilot_steps must be >= 1");
    start.validate();
    const TimeGrid pilot{grid.tau, std::min(pilot_steps, grid.n_time)};
    TimeLoopConfig pilot_cfg = cfg;
    pilot_cfg.store_states = false;
    double worst = 0.0;
    const auto meets = [&](int n_iter) {
        SweepSchedule s = start;
        s.n_iter = n_iter;
        worst = run_inverted_serial(system, precond, pilot, s, pilot_cfg).max_final_residual();
        return worst <= cfg.krylov.tol;
    };
    // Doubling to bracket the budget, then bisection for the smallest passing n_iter.
    int bad = start.n_iter - 1;
    int good = start.n_iter;
    while (!meets(good)) {
        if (good >= max_n_iter) throw ConvergenceError(pilot.n_time, worst);
        bad = good;
        good = std::min(2 * good, max_n_iter);
    }
    while (good - bad > 1) {
        const int mid = bad + (good - bad) / 2;
        if (meets(mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    SweepSchedule s = start;
    s.n_iter = good;
    return s;
}

}  // namespace biot
