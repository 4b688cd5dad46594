#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "error.hpp"

namespace sinnls {

/// Which branch of the min rule produced the newest step weight.
enum class growth_branch { initial, type_one, type_two };

/**
 * Step weights of the accelerated coordinate method.
 *
 *   a_1 = 1/(sqrt(2) n^1.5),  a_2 = a_1/(n-1),  A_0 = 0,  A_1 = a_1,
 *   A_{k+1} = A_k + a_{k+1},
 *   a_{k+2} = min(n a_{k+1}/(n-1), sqrt(A_{k+1})/(2n)).
 *
 * At position k the schedule exposes a_{k-1}, a_k, a_{k+1} and the window
 * A_{k-2}, A_{k-1}, A_k, A_{k+1}. Indices below zero read as 0.
 */
class step_schedule
{
public:
    explicit step_schedule(std::size_t n) : n_(n)
    {
        if (n < 2) {
            throw error(error_code::invalid_argument,
                "step schedule needs at least 2 coordinates, got " + std::to_string(n));
        }
        const auto nd = static_cast<double>(n);
        a_k_ = 1.0 / (std::sqrt(2.0) * std::pow(nd, 1.5));
        a_k1_ = a_k_ / (nd - 1.0);
        A_k_ = a_k_;
        A_k1_ = A_k_ + a_k1_;
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }

    double a_km1() const noexcept { return a_km1_; }
    double a_k() const noexcept { return a_k_; }
    double a_k1() const noexcept { return a_k1_; }
    double A_km2() const noexcept { return A_km2_; }
    double A_km1() const noexcept { return A_km1_; }
    double A_k() const noexcept { return A_k_; }
    double A_k1() const noexcept { return A_k1_; }

    /// The algorithm's analysis assumes n >= 4; smaller n still runs.
    bool below_recommended() const noexcept { return n_ < 4; }

    /// Branch that produced a_{k+1} (initial for the fixed a_2).
    growth_branch last_branch() const noexcept { return branch_; }

    /// Moves to position k+1, computing a_{k+2} and A_{k+2}.
    growth_branch advance() noexcept
    {
        const auto nd = static_cast<double>(n_);
        const double growth = nd * a_k1_ / (nd - 1.0);
        const double root = std::sqrt(A_k1_) / (2.0 * nd);
        const double next = growth <= root ? growth : root;
        branch_ = growth <= root ? growth_branch::type_one : growth_branch::type_two;

        a_km1_ = a_k_;
        a_k_ = a_k1_;
        a_k1_ = next;
        A_km2_ = A_km1_;
        A_km1_ = A_k_;
        A_k_ = A_k1_;
        A_k1_ = A_k_ + a_k1_;
        ++k_;
        return branch_;
    }

private:
    std::size_t n_;
    std::size_t k_ = 1;
    double a_km1_ = 0;
    double a_k_ = 0;
    double a_k1_ = 0;
    double A_km2_ = 0;
    double A_km1_ = 0;
    double A_k_ = 0;
    double A_k1_ = 0;
    growth_branch branch_ = growth_branch::initial;
};

/// Iteration budget ceil(2.5 n ln n + 6 n / sqrt(epsilon)) for multiplicative accuracy epsilon.
inline std::size_t horizon(std::size_t n, double epsilon)
{
    if (!(epsilon > 0) || !std::isfinite(epsilon)) {
        throw error(error_code::invalid_argument, "epsilon must be positive and finite");
    }
    const auto nd = static_cast<double>(n);
    const double lead = n > 0 ? 2.5 * nd * std::log(nd) : 0.0;
    return static_cast<std::size_t>(std::ceil(lead + 6.0 * nd / std::sqrt(epsilon)));
}

} // namespace sinnls
