#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lazy_solver.hpp"
#include "residual.hpp"
#include "solve.hpp"

namespace sinnls {

struct restart_config
{
    /// Stop once r(x~) <= target_residual.
    double target_residual = 1e-6;
    /// Restart when r(x~) <= halving_factor * r(anchor).
    double halving_factor = 0.5;
    /// Inner iterations between residual checks; 0 means one epoch (n iterations).
    std::size_t check_cadence = 0;
    std::size_t max_restarts = std::numeric_limits<std::size_t>::max();
    std::size_t max_total_iters = std::numeric_limits<std::size_t>::max();
    std::uint64_t seed = 0;
    std::size_t block_size = 1;
    bool drift_check = true;

    void check() const
    {
        if (!(halving_factor > 0 && halving_factor < 1)) {
            throw error(error_code::invalid_argument, "halving factor must lie in (0, 1)");
        }
        if (!(target_residual >= 0)) throw error(error_code::invalid_argument, "target residual must be >= 0");
    }
};

struct restart_result : solve_result
{
    /// r(anchor) at the start and after every restart; each entry is at most
    /// halving_factor times the previous one.
    std::vector<double> anchor_residuals;
    /// Global iteration indices at which a restart fired.
    std::vector<std::size_t> restart_iters;
};

/**
 * Accelerated coordinate method with adaptive restarts.
 *
 * Every `check_cadence` inner iterations the averaged iterate x~ is scored by
 * its natural residual. Once the residual has halved relative to the current
 * anchor, x~ becomes the new anchor and the method is restarted from it with
 * a fresh schedule. The loop ends when the residual reaches the target or a
 * budget runs out; the best checked point is returned.
 */
inline restart_result solve_restarted(const problem_instance& inst, std::span<const double> x0,
                                      const restart_config& cfg = {})
{
    cfg.check();
    restart_result out;
    if (inst.all_dropped()) {
        static_cast<solve_result&>(out) = detail::trivial_result(inst);
        out.anchor_residuals.push_back(0.0);
        return out;
    }

    detail::stopwatch clock;
    auto anchor = detail::start_vector(inst, x0);
    lazy_state state(inst, anchor, cfg.seed, detail::partition_for(inst, cfg.block_size));
    const auto cadence = cfg.check_cadence == 0 ? state.units() : cfg.check_cadence;

    double anchor_res = natural_residual(inst, anchor);
    out.anchor_residuals.push_back(anchor_res);
    out.metrics.records.push_back(
        {0, state.data_passes(), clock.seconds(), objective(inst, anchor), anchor_res, metric_event::none});

    auto best = anchor;
    double best_res = anchor_res;
    std::size_t total = 0;
    std::size_t restarts = 0;
    bool converged = anchor_res <= cfg.target_residual;

    if (!converged && cfg.max_total_iters > 0) {
        state.first_step();
        total = 1;
    }
    while (!converged && total > 0) {
        const bool at_budget = total >= cfg.max_total_iters;
        if (state.iterations() % cadence != 0 && !at_budget) {
            state.step();
            ++total;
            continue;
        }

        if (cfg.drift_check) state.resync();
        auto xt = state.output();
        const double res = natural_residual(inst, xt);
        metrics_record record{total, 0.0, 0.0, objective(inst, xt), res, metric_event::none};
        if (res < best_res) {
            best = xt;
            best_res = res;
        }
        bool restarted = false;
        if (res <= cfg.target_residual) {
            converged = true;
        } else if (restarts < cfg.max_restarts && res <= cfg.halving_factor * anchor_res) {
            anchor = std::move(xt);
            anchor_res = res;
            out.anchor_residuals.push_back(res);
            out.restart_iters.push_back(total);
            ++restarts;
            record.event = metric_event::restart;
            state.restart(anchor);
            restarted = true;
        }
        record.data_passes = state.data_passes();
        record.wall_s = clock.seconds();
        out.metrics.records.push_back(record);

        if (converged || at_budget) break;
        if (restarted) {
            state.first_step();
        } else {
            state.step();
        }
        ++total;
    }

    out.sol = detail::finish(inst, best, total, restarts, state.data_passes(), !converged);
    return out;
}

} // namespace sinnls
