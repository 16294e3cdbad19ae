#include <algorithm>
#include <chrono>
#include <cstdio>
#include <utility>
#include <vector>

#include "biot/benchmarks.hpp"
#include "biot/biot_system.hpp"
#include "biot/cli.hpp"
#include "biot/efficiency.hpp"
#include "biot/mesh.hpp"
#include "biot/preconditioner.hpp"
#include "biot/reporting.hpp"
#include "biot/timeloop.hpp"

namespace biot::cli {

BenchmarkCase make_case(const RunConfig& config) {
    BenchmarkCase c;
    if (config.case_name == "trig") {
        c = trig_case();
    } else if (config.case_name == "barry-mercer") {
        BarryMercerOptions opts;
        if (config.permeability) opts.K = *config.permeability;
        c = barry_mercer_case(opts);
    } else if (config.case_name == "mandel") {
        c = mandel_case();
    } else if (config.case_name == "zero") {
        c = zero_forcing_case();
    } else {
        throw ConfigError("case: unknown case '" + config.case_name + "'");
    }
    c.stabilized = config.stabilization;
    return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const Point mandel_probe{0.25, 0.0};

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const auto t_start = Clock::now();
        const BenchmarkCase bcase = make_case(config);
        const StructuredTriMesh mesh = build_uniform_mesh(config.nx, config.ny, bcase.domain);
        const BiotSystem system = BiotSystem::build(bcase, mesh, config.tau);
        const PreconditionerKind kind =
            config.precond == "p1" ? PreconditionerKind::LowerTriangular : PreconditionerKind::BlockDiagonal;
        const BlockPreconditioner precond = BlockPreconditioner::build(kind, system);
        const TimeGrid grid{config.tau, config.n_time};

        TimeLoopConfig loop;
        loop.krylov = KrylovConfig::to_tolerance(config.tol, config.max_iters, config.restart);
        loop.matching_mode = config.match_tolerance;
        loop.stage_time_budget = config.stage_budget;
        loop.store_states = false;

        SweepSchedule schedule{1, 1, 1};
        if (config.engine != "sequential") {
            if (config.n_iter) {
                schedule = SweepSchedule::parallel(config.threads, *config.n_iter);
            } else {
                schedule = calibrate_iteration_budget(system, precond, grid, loop, config.pilot_steps, config.threads);
                schedule = refine_schedule_to_tolerance(system, precond, grid, loop, config.pilot_steps, schedule);
            }
        }

        const int probe = nearest_node(mesh, mandel_probe);
        const int np_offset = system.layout().num_u();
        Vector final_state;
        std::vector<std::pair<double, double>> probe_history;
        const auto sink = [&](int n, std::span<const double> y) {
            if (bcase.plate) probe_history.emplace_back(grid.time(n), y[np_offset + probe]);
            if (n == grid.n_time) final_state.assign(y.begin(), y.end());
        };

        std::vector<double> walls;
        TimeLoopResult result;
        int exit_code = ExitCode::ok;
        for (int rep = 0; rep < config.repeat; ++rep) {
            probe_history.clear();
            if (bcase.plate) probe_history.emplace_back(0.0, system.initial_state()[np_offset + probe]);
            const auto t0 = Clock::now();
            try {
                if (config.engine == "sequential") {
                    result = run_sequential(system, precond, grid, loop, sink);
                } else if (config.engine == "inverted") {
                    result = run_inverted_serial(system, precond, grid, schedule, loop, sink);
                } else {
                    result = run_pipeline_parallel(system, precond, grid, schedule, loop, sink);
                }
            } catch (const ConvergenceError& e) {
                err << "error: " << e.what() << "\n";
                return ExitCode::tolerance_violation;
            }
            walls.push_back(seconds_since(t0));
        }
        std::sort(walls.begin(), walls.end());

        RunRecord rec;
        rec.case_name = bcase.name;
        rec.h = mesh.h();
        rec.tau = config.tau;
        rec.n_time = config.n_time;
        rec.engine = config.engine;
        rec.preconditioner = config.precond;
        rec.n_threads = config.engine == "sequential" ? 1 : schedule.n_threads;
        rec.n_iter = config.engine == "sequential" ? result.max_iterations() : schedule.n_iter;
        rec.N_iter = config.engine == "sequential" ? result.max_iterations() : schedule.N_iter();
        rec.wall_seconds = walls[walls.size() / 2];
        rec.max_final_residual = result.max_final_residual();
        rec.mean_iterations = result.mean_iterations();
        rec.max_iterations = result.max_iterations();

        const Vector x = system.to_physical(final_state);
        if (bcase.exact) {
            rec.l2_error_p = l2_error(mesh, system.pressure(x), bcase.exact->p, grid.T());
            rec.l2_error_u = l2_error_displacement(mesh, std::span<const double>(x).first(system.layout().num_u()),
                                                   bcase.exact->u, grid.T());
        }
        if (config.engine != "sequential") {
            const KernelTimings kt = measure_kernel_timings(system, precond, config.tau, loop.krylov);
            const EfficiencyEstimate e = theoretical_efficiency(
                {kt.T_b, kt.t_iter, schedule.N_iter(), schedule.n_iter, schedule.n_threads, grid.n_time});
            rec.E1 = e.E1;
            rec.E2 = e.E2;
            rec.E = e.E;
        }
        if (bcase.plate) {
            rec.mandel_cryer = mandel_cryer_indicator(probe_history).present ? "present" : "absent";
        }
        rec.total_seconds = seconds_since(t_start);
        rec.timestamp = utc_timestamp();
        emit_csv({rec}, config.output);

        out << "case " << rec.case_name << "  h " << rec.h << "  tau " << rec.tau << "  steps " << rec.n_time
            << "  engine " << rec.engine << "  precond " << rec.preconditioner << "  threads " << rec.n_threads
            << "  n_iter " << rec.n_iter << "\n";
        out << "wall " << rec.wall_seconds << " s  max final residual " << rec.max_final_residual << "\n";
        if (rec.l2_error_p) out << "L2 pressure error " << *rec.l2_error_p << "\n";
        if (!rec.mandel_cryer.empty()) out << "Mandel-Cryer effect " << rec.mandel_cryer << "\n";
        if (result.watchdog_tripped) err << "warning: stage " << result.watchdog_stage << " exceeded the time budget\n";
        out << "wrote " << config.output << "\n";

        const auto bad = result.steps_above(config.tol);
        if (!bad.empty()) {
            err << "error: " << bad.size() << " step(s) above tolerance, first at step " << bad.front() << "\n";
            exit_code = ExitCode::tolerance_violation;
        }
        return exit_code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitCode::failure;
    }
}

}  // namespace biot::cli
