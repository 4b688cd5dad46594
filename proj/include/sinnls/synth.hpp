#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"
#include "io.hpp"
#include "sparse_matrix.hpp"

namespace sinnls {

/**
 * Random nonnegative sparse regression instance.
 *
 * Entries are present with probability `density` and drawn from U(0.1, 1);
 * every row and column gets at least one entry. Column j is then multiplied
 * by cond^{u_j} with u_0 = 0, u_{n-1} = 1 and u_j ~ U(0, 1) otherwise, so
 * the largest-to-smallest column scale ratio is exactly `cond`. Labels are
 * b = A x_true + noise, with x_true half zeros.
 */
struct synth_params
{
    std::size_t m = 50;
    std::size_t n = 100;
    double density = 0.3;
    double cond = 1.0;
    double noise = 0.05;
    std::uint64_t seed = 0;
};

inline dataset make_synthetic(const synth_params& p)
{
    if (p.m == 0 || p.n == 0) throw error(error_code::invalid_argument, "synthetic dimensions must be positive");
    if (!(p.density > 0 && p.density <= 1)) throw error(error_code::invalid_argument, "density must lie in (0, 1]");
    if (!(p.cond >= 1)) throw error(error_code::invalid_argument, "cond must be >= 1");

    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> magnitude(0.1, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> scale(p.n);
    for (std::size_t j = 0; j < p.n; ++j) {
        double u = unit(rng);
        if (j == 0) u = 0;
        if (j + 1 == p.n && p.n > 1) u = 1;
        scale[j] = std::pow(p.cond, u);
    }

    std::vector<std::vector<char>> present(p.n, std::vector<char>(p.m, 0));
    std::vector<std::size_t> row_hits(p.m, 0);
    for (std::size_t j = 0; j < p.n; ++j) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < p.m; ++i) {
            if (unit(rng) < p.density) {
                present[j][i] = 1;
                ++hits;
                ++row_hits[i];
            }
        }
        if (hits == 0) {
            const auto i = static_cast<std::size_t>(unit(rng) * static_cast<double>(p.m)) % p.m;
            present[j][i] = 1;
            ++row_hits[i];
        }
    }
    for (std::size_t i = 0; i < p.m; ++i) {
        if (row_hits[i] == 0) {
            const auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(p.n)) % p.n;
            present[j][i] = 1;
        }
    }

    std::vector<triplet> entries;
    for (std::size_t j = 0; j < p.n; ++j) {
        for (std::size_t i = 0; i < p.m; ++i) {
            if (present[j][i]) entries.push_back({i, j, magnitude(rng) * scale[j]});
        }
    }

    dataset out;
    out.matrix = sparse_col_matrix::from_triplets(p.m, p.n, std::move(entries));

    std::vector<double> x_true(p.n, 0.0);
    for (std::size_t j = 0; j < p.n; ++j) {
        if (unit(rng) < 0.5) x_true[j] = unit(rng) / scale[j];
    }
    out.labels = out.matrix.multiply(x_true);
    double mean = 0;
    for (double v : out.labels) mean += std::abs(v);
    mean /= static_cast<double>(p.m);
    if (mean == 0) mean = 1;
    for (auto& v : out.labels) v += p.noise * mean * gauss(rng);
    return out;
}

} // namespace sinnls
