#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"
#include "sparse_matrix.hpp"

namespace sinnls {

/**
 * Estimates |A|_2^2 by power iteration on A^T A from the normalized all-ones
 * vector. Returns the Rayleigh quotient |A v|^2 / |v|^2 at the final iterate,
 * which never exceeds the true value.
 */
inline double spectral_norm_sq(const sparse_col_matrix& a, std::size_t sweeps = 500)
{
    if (a.rows() == 0 || a.cols() == 0) {
        throw error(error_code::empty_matrix, "spectral norm of an empty matrix");
    }
    if (sweeps == 0) throw error(error_code::invalid_argument, "power iteration needs at least one sweep");

    std::vector<double> v(a.cols(), 1.0 / std::sqrt(static_cast<double>(a.cols())));
    std::vector<double> av(a.rows());
    std::vector<double> z(a.cols());
    auto sq = [](const std::vector<double>& u) {
        double s = 0;
        for (double e : u) s += e * e;
        return s;
    };

    for (std::size_t it = 0; it < sweeps; ++it) {
        a.multiply(v, av);
        a.transpose_multiply(av, z);
        const double norm = std::sqrt(sq(z));
        if (norm == 0) return 0;
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = z[j] / norm;
    }
    a.multiply(v, av);
    return sq(av) / sq(v);
}

} // namespace sinnls
