#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "sparse_matrix.hpp"

namespace sinnls {

/// nonnegative: A >= 0 is enforced and the coordinate box [0, c_j/lambda_j] is used.
/// general: A may have any sign; only x >= 0 is imposed.
enum class data_mode { nonnegative, general };

inline std::string_view to_string(data_mode mode)
{
    return mode == data_mode::nonnegative ? "nonnegative" : "general";
}

struct validated_matrix
{
    sparse_col_matrix matrix;
    /// kept_rows[i] is the original row index of row i of `matrix`.
    std::vector<std::size_t> kept_rows;
    std::size_t original_rows = 0;

    std::size_t removed_rows() const noexcept { return original_rows - kept_rows.size(); }
};

/**
 * Checks a data matrix for use as NNLS data. All-zero rows carry no
 * information and are removed (the caller decides whether to log it); an
 * all-zero column makes the problem unbounded and is rejected.
 */
inline validated_matrix validate(const sparse_col_matrix& matrix, data_mode mode)
{
    if (matrix.rows() == 0 || matrix.cols() == 0 || matrix.nnz() == 0) {
        throw error(error_code::empty_matrix, "matrix has no stored entries");
    }
    const auto values = matrix.values();
    const auto row_idx = matrix.row_idx();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) {
            throw error(error_code::malformed_matrix, "non-finite matrix entry");
        }
    }
    if (mode == data_mode::nonnegative) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            const auto col = matrix.column(j);
            for (std::size_t k = 0; k < col.size(); ++k) {
                if (col.values[k] < 0) {
                    throw error(error_code::negative_entry,
                        "entry (" + std::to_string(col.rows[k] + 1) + ", " + std::to_string(j + 1)
                        + ") is negative in nonnegative mode");
                }
            }
        }
    }
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        if (matrix.nnz(j) == 0) {
            throw error(error_code::zero_column, "column " + std::to_string(j + 1) + " is all zero");
        }
    }

    std::vector<std::size_t> row_count(matrix.rows(), 0);
    for (auto r : row_idx) ++row_count[r];

    validated_matrix out;
    out.original_rows = matrix.rows();
    std::vector<std::size_t> new_index(matrix.rows(), 0);
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        if (row_count[i] > 0) {
            new_index[i] = out.kept_rows.size();
            out.kept_rows.push_back(i);
        }
    }
    if (out.kept_rows.size() == matrix.rows()) {
        out.matrix = matrix;
        return out;
    }
    std::vector<std::size_t> rows(row_idx.begin(), row_idx.end());
    for (auto& r : rows) r = new_index[r];
    const auto ptr = matrix.col_ptr();
    out.matrix = sparse_col_matrix(out.kept_rows.size(), matrix.cols(),
        {ptr.begin(), ptr.end()}, std::move(rows), {values.begin(), values.end()});
    return out;
}

/**
 * Preprocessed NNLS instance: minimize 0.5 |A x|^2 - <c, x> over the feasible
 * set. Only retained columns are stored; `retained()[j]` maps back to the
 * original column index.
 */
class problem_instance
{
public:
    problem_instance() = default;

    /// Direct construction from a matrix and linear term with every column retained.
    static problem_instance from_linear_term(sparse_col_matrix a, std::vector<double> c, data_mode mode)
    {
        if (c.size() != a.cols()) {
            throw error(error_code::dimension_mismatch, "linear term length must equal column count");
        }
        std::vector<std::size_t> retained(a.cols());
        std::iota(retained.begin(), retained.end(), std::size_t{0});
        const auto original_cols = a.cols();
        return problem_instance(std::move(a), std::move(c), std::move(retained), original_cols, mode);
    }

    problem_instance(
        sparse_col_matrix a,
        std::vector<double> c,
        std::vector<std::size_t> retained,
        std::size_t original_cols,
        data_mode mode
    )
        : a_(std::move(a)), c_(std::move(c)), retained_(std::move(retained)),
          original_cols_(original_cols), mode_(mode)
    {
        lambda_.resize(a_.cols());
        upper_.resize(a_.cols());
        for (std::size_t j = 0; j < a_.cols(); ++j) {
            lambda_[j] = a_.col_sq_norm(j);
            if (!(lambda_[j] > 0)) {
                throw error(error_code::zero_column, "retained column " + std::to_string(retained_[j] + 1) + " has zero norm");
            }
            if (mode_ == data_mode::nonnegative) {
                if (!(c_[j] > 0)) {
                    throw error(error_code::invalid_argument, "nonnegative mode requires c_j > 0 on retained columns");
                }
                upper_[j] = c_[j] / lambda_[j];
            } else {
                upper_[j] = std::numeric_limits<double>::infinity();
            }
        }
        if (mode_ == data_mode::nonnegative) {
            for (double v : a_.values()) {
                if (v < 0) throw error(error_code::negative_entry, "negative entry in nonnegative mode");
            }
        }
    }

    const sparse_col_matrix& matrix() const noexcept { return a_; }
    std::span<const double> c() const noexcept { return c_; }
    std::span<const double> lambda() const noexcept { return lambda_; }
    /// Per-coordinate upper bound: c_j/lambda_j in nonnegative mode, +inf in general mode.
    std::span<const double> upper() const noexcept { return upper_; }
    std::span<const std::size_t> retained() const noexcept { return retained_; }
    data_mode mode() const noexcept { return mode_; }

    std::size_t m() const noexcept { return a_.rows(); }
    std::size_t n() const noexcept { return a_.cols(); }
    std::size_t nnz() const noexcept { return a_.nnz(); }
    std::size_t original_cols() const noexcept { return original_cols_; }
    std::size_t dropped() const noexcept { return original_cols_ - retained_.size(); }
    /// Every column had c_j <= 0: the solution is x = 0.
    bool all_dropped() const noexcept { return retained_.empty(); }

    double clamp(std::size_t j, double v) const noexcept { return std::clamp(v, 0.0, upper_[j]); }

private:
    sparse_col_matrix a_;
    std::vector<double> c_;
    std::vector<double> lambda_;
    std::vector<double> upper_;
    std::vector<std::size_t> retained_;
    std::size_t original_cols_ = 0;
    data_mode mode_ = data_mode::nonnegative;
};

/**
 * Builds the instance from a validated matrix and labels b. `b` may be given
 * in the original row indexing (rows removed by validate() are skipped) or
 * already restricted to the kept rows. In nonnegative mode columns with
 * c_j = <A_:j, b> <= 0 are dropped, since their optimal value is 0.
 */
inline problem_instance preprocess(const validated_matrix& vm, std::span<const double> b, data_mode mode)
{
    const auto& a = vm.matrix;
    std::vector<double> b_kept;
    if (b.size() == vm.original_rows) {
        b_kept.reserve(vm.kept_rows.size());
        for (auto i : vm.kept_rows) b_kept.push_back(b[i]);
    } else if (b.size() == a.rows()) {
        b_kept.assign(b.begin(), b.end());
    } else {
        throw error(error_code::dimension_mismatch,
            "label vector has " + std::to_string(b.size()) + " entries, matrix has "
            + std::to_string(vm.original_rows) + " rows");
    }
    const auto c_full = a.transpose_multiply(b_kept);

    if (mode == data_mode::general) {
        return problem_instance(a, c_full, [&] {
            std::vector<std::size_t> r(a.cols());
            std::iota(r.begin(), r.end(), std::size_t{0});
            return r;
        }(), a.cols(), mode);
    }

    std::vector<std::size_t> retained;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        if (c_full[j] > 0) retained.push_back(j);
    }
    if (retained.size() == a.cols()) {
        return problem_instance(a, c_full, std::move(retained), a.cols(), mode);
    }

    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> rows;
    std::vector<double> values;
    std::vector<double> c;
    for (auto j : retained) {
        const auto col = a.column(j);
        rows.insert(rows.end(), col.rows.begin(), col.rows.end());
        values.insert(values.end(), col.values.begin(), col.values.end());
        ptr.push_back(rows.size());
        c.push_back(c_full[j]);
    }
    const auto n = retained.size();
    return problem_instance(
        sparse_col_matrix(a.rows(), n, std::move(ptr), std::move(rows), std::move(values)),
        std::move(c), std::move(retained), a.cols(), mode);
}

/// validate() followed by preprocess().
inline problem_instance make_instance(const sparse_col_matrix& a, std::span<const double> b, data_mode mode)
{
    return preprocess(validate(a, mode), b, mode);
}

namespace detail {

inline void check_length(const problem_instance& inst, std::span<const double> x, const char* what)
{
    if (x.size() != inst.n()) {
        throw error(error_code::dimension_mismatch,
            std::string(what) + ": expected " + std::to_string(inst.n()) + " coordinates, got "
            + std::to_string(x.size()));
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace detail

/// 0.5 |A x|^2 - <c, x>
inline double objective(const problem_instance& inst, std::span<const double> x)
{
    detail::check_length(inst, x, "objective");
    const auto ax = inst.matrix().multiply(x);
    return 0.5 * detail::dot(ax, ax) - detail::dot(inst.c(), x);
}

/// A^T A x - c
inline std::vector<double> gradient(const problem_instance& inst, std::span<const double> x)
{
    detail::check_length(inst, x, "gradient");
    const auto ax = inst.matrix().multiply(x);
    auto g = inst.matrix().transpose_multiply(ax);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] -= inst.c()[j];
    return g;
}

/// Scatters a retained-index vector into original column indexing; dropped columns get 0.
inline std::vector<double> unmap(const problem_instance& inst, std::span<const double> x_retained)
{
    detail::check_length(inst, x_retained, "unmap");
    std::vector<double> x(inst.original_cols(), 0.0);
    for (std::size_t j = 0; j < x_retained.size(); ++j) x[inst.retained()[j]] = x_retained[j];
    return x;
}

enum class metric_event { none, restart };

struct metrics_record
{
    std::size_t iter = 0;
    double data_passes = 0;
    double wall_s = 0;
    double objective = 0;
    double natural_residual = 0;
    metric_event event = metric_event::none;

    friend bool operator==(const metrics_record&, const metrics_record&) = default;
};

struct run_metrics
{
    std::vector<metrics_record> records;

    bool empty() const noexcept { return records.empty(); }
    std::size_t size() const noexcept { return records.size(); }
    std::size_t restart_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
            [](const metrics_record& r) { return r.event == metric_event::restart; }));
    }
};

struct solution
{
    /// Original column indexing; dropped columns are 0.
    std::vector<double> x;
    double objective = 0;
    double residual = 0;
    std::size_t iterations = 0;
    std::size_t restarts = 0;
    double data_passes = 0;
    bool budget_exhausted = false;
};

} // namespace sinnls
