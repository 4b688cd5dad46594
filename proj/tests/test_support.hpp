#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <sinnls/sinnls.hpp>

namespace sinnls::testing {

/// Random nonnegative instance with no column dropped (b is strictly positive).
inline problem_instance random_instance(std::size_t m, std::size_t n, double density, std::uint64_t seed,
                                        double cond = 1.0)
{
    synth_params p;
    p.m = m;
    p.n = n;
    p.density = density;
    p.seed = seed;
    p.cond = cond;
    auto data = make_synthetic(p);
    return make_instance(data.matrix, data.labels, data_mode::nonnegative);
}

inline problem_instance identity_instance(std::size_t n)
{
    std::vector<double> b(n, 1.0);
    return make_instance(sparse_col_matrix::identity(n), b, data_mode::nonnegative);
}

/// |a - b|_inf / max(|b|_inf, tiny)
inline double rel_dev(std::span<const double> a, std::span<const double> b)
{
    double diff = 0, scale = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return diff / std::max(scale, 1e-300);
}

/// Long restarted run used as the reference optimum.
inline double reference_optimum(const problem_instance& inst, std::size_t iterations = 1'000'000)
{
    restart_config cfg;
    cfg.target_residual = 1e-13;
    cfg.max_total_iters = iterations;
    return solve_restarted(inst, {}, cfg).sol.objective;
}

inline std::vector<double> random_box_point(const problem_instance& inst, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(inst.n());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = u(rng) * inst.upper()[j];
    return x;
}

} // namespace sinnls::testing
