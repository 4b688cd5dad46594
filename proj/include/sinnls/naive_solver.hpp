#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lazy_solver.hpp"
#include "model.hpp"
#include "schedule.hpp"

namespace sinnls {

struct naive_iterate
{
    std::vector<double> x;
    std::vector<double> x_tilde;
    std::vector<double> y;
};

/**
 * Dense reference form of the accelerated coordinate method. Keeps x~_k,
 * y_k and y-bar_k explicitly at O(m + n + nnz(A)) cost per iteration, so
 * it is only meant for small instances and as an oracle for lazy_state.
 * Uses the same sampler as lazy_state, hence identical coordinates for
 * equal seeds. Returns iterates k = 1..iterations.
 */
inline std::vector<naive_iterate> naive_run(const problem_instance& inst, std::span<const double> x0,
                                            std::size_t iterations, std::uint64_t seed)
{
    const auto& a = inst.matrix();
    const auto n = inst.n();
    const auto m = inst.m();
    const double nd = static_cast<double>(n);
    detail::check_length(inst, x0, "naive_run");

    step_schedule sched(n);
    coordinate_sampler sampler(n, seed);
    std::vector<naive_iterate> traj;
    if (iterations == 0) return traj;
    traj.reserve(iterations);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> p(n, 0.0);
    std::vector<double> ax = a.multiply(x);
    std::vector<double> y_prev = ax;   // y_0 = A x_0
    std::vector<double> y_bar = ax;    // y-bar_0 = y_0

    // k = 1: minimize a_1 <A^T y-bar_0 - c, x> + 0.5 |x - x_0|_Lambda^2 over the box.
    {
        const double a1 = sched.a_k();
        const auto g = a.transpose_multiply(y_bar);
        for (std::size_t j = 0; j < n; ++j) {
            p[j] = a1 * (g[j] - inst.c()[j]);
            x[j] = inst.clamp(j, x0[j] - p[j] / inst.lambda()[j]);
        }
        ax = a.multiply(x);
        auto y = ax;
        const double ratio = sched.a_k() / sched.a_k1();
        for (std::size_t i = 0; i < m; ++i) y_bar[i] = y[i] + ratio * (y[i] - y_prev[i]);
        traj.push_back({x, x, y});
        y_prev = std::move(y);
        sched.advance();
    }

    std::vector<double> x_tilde = x;
    for (std::size_t k = 2; k <= iterations; ++k) {
        const double ak = sched.a_k();
        const double Ak = sched.A_k();
        const double Akm1 = sched.A_km1();

        const auto j = sampler.next();
        const auto x_prev = x;
        const auto ax_prev = ax;
        p[j] += nd * ak * (a.col_dot(j, y_bar) - inst.c()[j]);
        x[j] = inst.clamp(j, x0[j] - p[j] / inst.lambda()[j]);
        ax = a.multiply(x);

        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) {
            y[i] = (Akm1 / Ak) * y_prev[i] + (ak / Ak) * ax[i] + ((nd - 1.0) * ak / Ak) * (ax[i] - ax_prev[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            x_tilde[i] = (Akm1 * x_tilde[i] + ak * (nd * x[i] - (nd - 1.0) * x_prev[i])) / Ak;
        }
        const double ratio = ak / sched.a_k1();
        for (std::size_t i = 0; i < m; ++i) y_bar[i] = y[i] + ratio * (y[i] - y_prev[i]);

        traj.push_back({x, x_tilde, y});
        y_prev = std::move(y);
        sched.advance();
    }
    return traj;
}

} // namespace sinnls
