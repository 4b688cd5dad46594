#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "schedule.hpp"
#include "spectral.hpp"

namespace sinnls {

/// Uniform sampling with replacement over {0, ..., n-1}.
class coordinate_sampler
{
public:
    coordinate_sampler(std::size_t n, std::uint64_t seed) : engine_(seed), dist_(0, n == 0 ? 0 : n - 1) {}

    std::size_t next() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::uniform_int_distribution<std::size_t> dist_;
};

/**
 * Contiguous column blocks for the mini-batch variant. Each block carries
 * |A_B|_2^2, floored at the largest member column norm.
 */
struct block_partition
{
    std::vector<std::size_t> starts{0};
    std::vector<double> block_norms;

    std::size_t blocks() const noexcept { return block_norms.size(); }
    std::size_t first(std::size_t b) const noexcept { return starts[b]; }
    std::size_t last(std::size_t b) const noexcept { return starts[b + 1]; }

    static block_partition contiguous(const problem_instance& inst, std::size_t block_size,
                                      std::size_t power_sweeps = 200)
    {
        if (block_size == 0) throw error(error_code::invalid_argument, "block size must be at least 1");
        block_partition out;
        for (std::size_t lo = 0; lo < inst.n(); lo += block_size) {
            const auto hi = std::min(inst.n(), lo + block_size);
            double norm = *std::max_element(inst.lambda().begin() + lo, inst.lambda().begin() + hi);
            if (hi - lo > 1) {
                norm = std::max(norm, spectral_norm_sq(inst.matrix().column_range(lo, hi), power_sweeps));
            }
            out.starts.push_back(hi);
            out.block_norms.push_back(norm);
        }
        return out;
    }
};

/**
 * Iterate bundle of the lazy accelerated coordinate method.
 *
 * Maintains x_k, the accumulated linear terms p, q = A x_k, the dual
 * correction s (y_k = A x_k + s_k / A_k), the last column touch
 * t = A (x_k - x_{k-1}) and the primal correction r (x~_k = x_k + r_k / A_k).
 * Each step after the first touches only the nonzeros of the sampled column
 * (or block).
 */
class lazy_state
{
public:
    lazy_state(const problem_instance& inst, std::span<const double> x0, std::uint64_t seed)
        : lazy_state(inst, x0, seed, std::nullopt)
    {}

    lazy_state(const problem_instance& inst, std::span<const double> x0, std::uint64_t seed,
               std::optional<block_partition> partition)
        : inst_(&inst),
          partition_(std::move(partition)),
          units_(partition_ ? partition_->blocks() : inst.n()),
          sched_(units_),
          sampler_(units_, seed)
    {
        if (partition_ && (partition_->starts.size() != units_ + 1 || partition_->starts.back() != inst.n())) {
            throw error(error_code::invalid_argument, "block partition does not cover the retained columns");
        }
        next_.resize(max_unit_size());
        delta_.resize(next_.size());
        mark_.assign(inst.m(), 0);
        reset(x0);
    }

    /// Restarts the method at a new anchor: fresh schedule, zeroed p, r, s, t and q = A anchor.
    void restart(std::span<const double> anchor) { reset(anchor); }

    /// Iteration k = 1: dense minimization of the first linear model (weight a_1, no factor n).
    void first_step()
    {
        if (iterations_ != 0) throw error(error_code::invalid_argument, "first_step on a started run");
        const auto& a = inst_->matrix();
        const auto n = inst_->n();
        const double a1 = sched_.a_k();

        clear_t();
        std::vector<double> step(n);
        for (std::size_t u = 0; u < units_; ++u) {
            for (auto j = unit_first(u); j < unit_last(u); ++j) {
                const double g = a.col_dot(j, q_) - inst_->c()[j];
                p_[j] += a1 * g;
                const double xn = inst_->clamp(j, x0_[j] - p_[j] / unit_norm(u, j));
                step[j] = xn - x_[j];
                x_[j] = xn;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (step[j] != 0) a.col_axpy(j, step[j], t_);
        }
        t_dense_ = true;
        for (std::size_t i = 0; i < q_.size(); ++i) q_[i] += t_[i];

        last_touched_ = a.nnz();
        touched_ += last_touched_;
        sched_.advance();
        iterations_ = 1;
    }

    /// One iteration k >= 2 on a uniformly sampled coordinate (or block). Returns the unit index.
    std::size_t step()
    {
        const auto u = sampler_.next();
        step_unit(u);
        return u;
    }

    /// One iteration k >= 2 on a given unit; the sampled path calls this.
    void step_unit(std::size_t u)
    {
        if (iterations_ == 0) throw error(error_code::invalid_argument, "step before first_step");
        const auto& a = inst_->matrix();
        const double nu = static_cast<double>(units_);
        const double ak = sched_.a_k();
        const double akm1 = sched_.a_km1();

        // y-bar_{k-1} = q + alpha s + beta t
        double alpha = 0;
        double beta = akm1 / ak;
        if (sched_.k() >= 3) {
            const double ratio = akm1 * akm1 / (ak * sched_.A_km2());
            alpha = (1.0 - ratio) / sched_.A_km1();
            beta = (nu - 1.0) * ratio;
        }

        const auto lo = unit_first(u);
        const auto hi = unit_last(u);
        std::size_t touched = 0;
        bool moved = false;
        for (auto j = lo; j < hi; ++j) {
            const auto col = a.column(j);
            double dq = 0, ds = 0, dt = 0;
            for (std::size_t e = 0; e < col.size(); ++e) {
                const auto row = col.rows[e];
                dq += col.values[e] * q_[row];
                ds += col.values[e] * s_[row];
                dt += col.values[e] * t_[row];
            }
            touched += col.size();
            const double g = dq + alpha * ds + beta * dt - inst_->c()[j];
            p_[j] += nu * ak * g;
            const double xn = inst_->clamp(j, x0_[j] - p_[j] / unit_norm(u, j));
            next_[j - lo] = xn;
            delta_[j - lo] = xn - x_[j];
            moved = moved || delta_[j - lo] != 0;
        }

        clear_t();
        if (moved) {
            const double w = (nu - 1.0) * ak - sched_.A_km1();
            for (auto j = lo; j < hi; ++j) {
                const double d = delta_[j - lo];
                if (d == 0) continue;
                const auto col = a.column(j);
                for (std::size_t e = 0; e < col.size(); ++e) {
                    const auto row = col.rows[e];
                    if (!mark_[row]) {
                        mark_[row] = 1;
                        t_support_.push_back(row);
                    }
                    t_[row] += d * col.values[e];
                }
                r_[j] += w * d;
                x_[j] = next_[j - lo];
            }
            for (auto row : t_support_) {
                mark_[row] = 0;
                s_[row] += w * t_[row];
                q_[row] += t_[row];
            }
        }

        last_touched_ = touched;
        touched_ += touched;
        sched_.advance();
        ++iterations_;
    }

    /**
     * x~_K = x_K + r_K / A_K for the last completed iteration K. x~ is a
     * convex combination of iterates, so the box clamp only removes rounding.
     */
    std::vector<double> output() const
    {
        std::vector<double> out(x_);
        if (iterations_ == 0) return out;
        const double A = sched_.A_km1();
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = inst_->clamp(j, out[j] + r_[j] / A);
        return out;
    }

    /**
     * Compares q against a dense recomputation of A x and replaces it when
     * |q - A x| > tol (1 + |q|). Returns true when q was replaced.
     */
    bool resync(double tol = 1e-8)
    {
        const auto ax = inst_->matrix().multiply(x_);
        double diff = 0, norm = 0;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            diff += (q_[i] - ax[i]) * (q_[i] - ax[i]);
            norm += q_[i] * q_[i];
        }
        if (std::sqrt(diff) <= tol * (1.0 + std::sqrt(norm))) return false;
        q_ = ax;
        return true;
    }

    const problem_instance& instance() const noexcept { return *inst_; }
    const step_schedule& schedule() const noexcept { return sched_; }
    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> x0() const noexcept { return x0_; }
    std::span<const double> p() const noexcept { return p_; }
    std::span<const double> q() const noexcept { return q_; }
    std::span<const double> s() const noexcept { return s_; }
    std::span<const double> t() const noexcept { return t_; }
    std::span<const double> r() const noexcept { return r_; }

    /// Sampling units: columns, or blocks when partitioned.
    std::size_t units() const noexcept { return units_; }
    /// Completed iterations since the last (re)start.
    std::size_t iterations() const noexcept { return iterations_; }
    /// Cumulative matrix nonzeros touched, including restarts.
    std::size_t touched_nonzeros() const noexcept { return touched_; }
    std::size_t last_touched() const noexcept { return last_touched_; }
    double data_passes() const noexcept
    {
        return static_cast<double>(touched_) / static_cast<double>(inst_->nnz());
    }

private:
    std::size_t unit_first(std::size_t u) const noexcept { return partition_ ? partition_->first(u) : u; }
    std::size_t unit_last(std::size_t u) const noexcept { return partition_ ? partition_->last(u) : u + 1; }
    double unit_norm(std::size_t u, std::size_t j) const noexcept
    {
        return partition_ ? partition_->block_norms[u] : inst_->lambda()[j];
    }
    std::size_t max_unit_size() const noexcept
    {
        if (!partition_) return 1;
        std::size_t m = 1;
        for (std::size_t b = 0; b < units_; ++b) m = std::max(m, unit_last(b) - unit_first(b));
        return m;
    }

    void clear_t()
    {
        if (t_dense_) {
            std::fill(t_.begin(), t_.end(), 0.0);
            t_dense_ = false;
        } else {
            for (auto row : t_support_) t_[row] = 0;
        }
        t_support_.clear();
    }

    void reset(std::span<const double> anchor)
    {
        const auto n = inst_->n();
        if (anchor.size() != n) {
            throw error(error_code::dimension_mismatch,
                "start vector has " + std::to_string(anchor.size()) + " entries, expected " + std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!(anchor[j] >= 0) || !(anchor[j] <= inst_->upper()[j])) {
                throw error(error_code::out_of_box, "start coordinate " + std::to_string(j) + " outside the feasible box");
            }
        }
        x0_.assign(anchor.begin(), anchor.end());
        x_ = x0_;
        p_.assign(n, 0.0);
        r_.assign(n, 0.0);
        s_.assign(inst_->m(), 0.0);
        t_.assign(inst_->m(), 0.0);
        t_support_.clear();
        t_dense_ = false;
        q_ = inst_->matrix().multiply(x0_);
        if (std::any_of(x0_.begin(), x0_.end(), [](double v) { return v != 0; })) touched_ += inst_->nnz();
        sched_ = step_schedule(units_);
        iterations_ = 0;
        last_touched_ = 0;
    }

    const problem_instance* inst_;
    std::optional<block_partition> partition_;
    std::size_t units_;
    step_schedule sched_;
    coordinate_sampler sampler_;

    std::vector<double> x0_, x_, p_, r_;
    std::vector<double> q_, s_, t_;
    std::vector<std::size_t> t_support_;
    std::vector<char> mark_;
    bool t_dense_ = false;
    std::vector<double> next_, delta_;

    std::size_t iterations_ = 0;
    std::size_t touched_ = 0;
    std::size_t last_touched_ = 0;
};

} // namespace sinnls
