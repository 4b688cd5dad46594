#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "model.hpp"
#include "residual.hpp"
#include "solve.hpp"
#include "spectral.hpp"

namespace sinnls {

enum class baseline_method { fista, pgd };

struct baseline_config
{
    baseline_method method = baseline_method::fista;
    std::size_t max_iters = 10000;
    /// Stop once the natural residual of the iterate is at or below this value.
    double tolerance = 1e-6;
    std::size_t power_iters = 500;
    /// Use this Lipschitz constant instead of estimating |A|^2; ignored when <= 0.
    double lipschitz = 0;
};

namespace detail {

inline double lipschitz_for(const problem_instance& inst, const baseline_config& cfg)
{
    if (cfg.power_iters == 0) throw error(error_code::invalid_argument, "power_iters must be at least 1");
    return cfg.lipschitz > 0 ? cfg.lipschitz : spectral_norm_sq(inst.matrix(), cfg.power_iters);
}

/// x <- (v - grad / L)_+ ; baselines project onto x >= 0 only.
inline void projected_step(std::span<const double> v, std::span<const double> grad, double inv_l,
                           std::span<double> out)
{
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(v[j] - grad[j] * inv_l, 0.0);
}

} // namespace detail

/**
 * FISTA with step 1/L, L = |A|_2^2, and the projection onto x >= 0 as the
 * proximal map. One gradient evaluation (one data pass) per iteration.
 */
inline solve_result fista(const problem_instance& inst, std::span<const double> x0, const baseline_config& cfg = {})
{
    if (inst.all_dropped()) return detail::trivial_result(inst);
    detail::stopwatch clock;
    const double inv_l = 1.0 / detail::lipschitz_for(inst, cfg);

    auto x = detail::start_vector(inst, x0);
    auto y = x;
    std::vector<double> x_next(x.size());
    double theta = 1.0;

    solve_result out;
    double res = natural_residual(inst, x);
    out.metrics.records.push_back({0, 0.0, clock.seconds(), objective(inst, x), res, metric_event::none});
    std::size_t it = 0;
    while (res > cfg.tolerance && it < cfg.max_iters) {
        const auto grad = gradient(inst, y);
        detail::projected_step(y, grad, inv_l, x_next);
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        const double momentum = (theta - 1.0) / theta_next;
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = x_next[j] + momentum * (x_next[j] - x[j]);
        x.swap(x_next);
        theta = theta_next;
        ++it;
        res = natural_residual(inst, x);
        out.metrics.records.push_back(
            {it, static_cast<double>(it), clock.seconds(), objective(inst, x), res, metric_event::none});
    }
    out.sol = detail::finish(inst, x, it, 0, static_cast<double>(it), res > cfg.tolerance);
    return out;
}

/// Projected gradient descent x <- (x - grad f(x) / L)_+, one data pass per iteration.
inline solve_result pgd(const problem_instance& inst, std::span<const double> x0, const baseline_config& cfg = {})
{
    if (inst.all_dropped()) return detail::trivial_result(inst);
    detail::stopwatch clock;
    const double inv_l = 1.0 / detail::lipschitz_for(inst, cfg);

    auto x = detail::start_vector(inst, x0);
    std::vector<double> x_next(x.size());

    solve_result out;
    double res = natural_residual(inst, x);
    out.metrics.records.push_back({0, 0.0, clock.seconds(), objective(inst, x), res, metric_event::none});
    std::size_t it = 0;
    while (res > cfg.tolerance && it < cfg.max_iters) {
        const auto grad = gradient(inst, x);
        detail::projected_step(x, grad, inv_l, x_next);
        x.swap(x_next);
        ++it;
        res = natural_residual(inst, x);
        out.metrics.records.push_back(
            {it, static_cast<double>(it), clock.seconds(), objective(inst, x), res, metric_event::none});
    }
    out.sol = detail::finish(inst, x, it, 0, static_cast<double>(it), res > cfg.tolerance);
    return out;
}

inline solve_result run_baseline(const problem_instance& inst, std::span<const double> x0, const baseline_config& cfg)
{
    return cfg.method == baseline_method::fista ? fista(inst, x0, cfg) : pgd(inst, x0, cfg);
}

} // namespace sinnls
