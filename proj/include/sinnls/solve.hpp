#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lazy_solver.hpp"
#include "model.hpp"
#include "residual.hpp"
#include "schedule.hpp"

namespace sinnls {

struct solve_result
{
    solution sol;
    run_metrics metrics;
};

namespace detail {

class stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline metrics_record make_record(const problem_instance& inst, std::size_t iter, double passes,
                                  double wall, std::span<const double> x,
                                  metric_event event = metric_event::none)
{
    return {iter, passes, wall, objective(inst, x), natural_residual(inst, x), event};
}

inline solution finish(const problem_instance& inst, std::span<const double> x, std::size_t iterations,
                       std::size_t restarts, double passes, bool exhausted)
{
    solution s;
    s.x = unmap(inst, x);
    s.objective = objective(inst, x);
    s.residual = natural_residual(inst, x);
    s.iterations = iterations;
    s.restarts = restarts;
    s.data_passes = passes;
    s.budget_exhausted = exhausted;
    return s;
}

/// Every column was dropped: x = 0 is optimal.
inline solve_result trivial_result(const problem_instance& inst)
{
    solve_result out;
    out.sol.x.assign(inst.original_cols(), 0.0);
    out.metrics.records.push_back({0, 0.0, 0.0, 0.0, 0.0, metric_event::none});
    return out;
}

inline std::vector<double> start_vector(const problem_instance& inst, std::span<const double> x0)
{
    if (x0.empty()) return std::vector<double>(inst.n(), 0.0);
    return {x0.begin(), x0.end()};
}

inline std::optional<block_partition> partition_for(const problem_instance& inst, std::size_t block_size)
{
    if (block_size <= 1) return std::nullopt;
    return block_partition::contiguous(inst, block_size);
}

} // namespace detail

struct plain_options
{
    /// Multiplicative accuracy target; sets the iteration count via horizon().
    double epsilon = 0.01;
    std::uint64_t seed = 0;
    std::size_t max_iters = std::numeric_limits<std::size_t>::max();
    /// Columns per sampled block; 1 is the plain coordinate method.
    std::size_t block_size = 1;
    bool drift_check = true;
};

/**
 * Runs the accelerated coordinate method for horizon(n, epsilon) iterations
 * from x0 (empty span means x0 = 0) and returns the averaged iterate.
 * Metrics are recorded at iteration 0, every n iterations and at the end.
 */
inline solve_result solve_plain(const problem_instance& inst, std::span<const double> x0,
                                const plain_options& opt = {})
{
    if (!(opt.epsilon > 0)) throw error(error_code::invalid_argument, "epsilon must be positive");
    if (inst.all_dropped()) return detail::trivial_result(inst);

    detail::stopwatch clock;
    const auto start = detail::start_vector(inst, x0);
    lazy_state state(inst, start, opt.seed, detail::partition_for(inst, opt.block_size));
    const auto epoch = state.units();
    const auto budget = horizon(epoch, opt.epsilon);
    const auto iterations = std::min(budget, opt.max_iters);

    solve_result out;
    out.metrics.records.push_back(detail::make_record(inst, 0, state.data_passes(), clock.seconds(), start));
    if (iterations == 0) {
        out.sol = detail::finish(inst, start, 0, 0, state.data_passes(), budget > 0);
        return out;
    }

    state.first_step();
    for (std::size_t k = 1; k <= iterations; ++k) {
        if (k > 1) state.step();
        if (k % epoch == 0 || k == iterations) {
            if (opt.drift_check) state.resync();
            out.metrics.records.push_back(
                detail::make_record(inst, k, state.data_passes(), clock.seconds(), state.output()));
        }
    }
    out.sol = detail::finish(inst, state.output(), iterations, 0, state.data_passes(), iterations < budget);
    return out;
}

} // namespace sinnls
