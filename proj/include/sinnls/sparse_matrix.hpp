#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"

namespace sinnls {

struct triplet
{
    std::size_t row;
    std::size_t col;
    double value;
};

/**
 * Immutable compressed-sparse-column matrix.
 *
 * Row indices inside each column are strictly increasing and explicit zeros
 * are never stored. Every solver in this library walks columns only, so CSC
 * is the single storage layout.
 */
class sparse_col_matrix
{
public:
    struct column_view
    {
        std::span<const std::size_t> rows;
        std::span<const double> values;

        std::size_t size() const noexcept { return rows.size(); }
    };

    sparse_col_matrix() : col_ptr_(1, 0) {}

    /// Takes ownership of raw CSC arrays after checking their structure.
    sparse_col_matrix(
        std::size_t rows,
        std::size_t cols,
        std::vector<std::size_t> col_ptr,
        std::vector<std::size_t> row_idx,
        std::vector<double> values
    )
        : rows_(rows), cols_(cols),
          col_ptr_(std::move(col_ptr)),
          row_idx_(std::move(row_idx)),
          values_(std::move(values))
    {
        check_structure();
    }

    /**
     * Builds a matrix from unordered triplets. Duplicate (row, col) pairs are
     * summed; entries that are (or sum to) exactly zero are dropped.
     * If `duplicates` is non-null it receives the number of merged entries.
     */
    static sparse_col_matrix from_triplets(
        std::size_t rows,
        std::size_t cols,
        std::vector<triplet> entries,
        std::size_t* duplicates = nullptr
    )
    {
        for (const auto& e : entries) {
            if (e.row >= rows || e.col >= cols) {
                throw error(error_code::malformed_matrix,
                    "triplet (" + std::to_string(e.row) + ", " + std::to_string(e.col)
                    + ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
            }
        }
        std::stable_sort(entries.begin(), entries.end(), [](const triplet& a, const triplet& b) {
            return std::tie(a.col, a.row) < std::tie(b.col, b.row);
        });

        std::vector<std::size_t> col_ptr(cols + 1, 0);
        std::vector<std::size_t> row_idx;
        std::vector<double> values;
        row_idx.reserve(entries.size());
        values.reserve(entries.size());

        std::size_t merged = 0;
        std::size_t i = 0;
        while (i < entries.size()) {
            const auto row = entries[i].row;
            const auto col = entries[i].col;
            double sum = entries[i].value;
            std::size_t j = i + 1;
            for (; j < entries.size() && entries[j].row == row && entries[j].col == col; ++j) {
                sum += entries[j].value;
                ++merged;
            }
            if (sum != 0.0) {
                row_idx.push_back(row);
                values.push_back(sum);
                ++col_ptr[col + 1];
            }
            i = j;
        }
        std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
        if (duplicates) *duplicates = merged;
        return sparse_col_matrix(rows, cols, std::move(col_ptr), std::move(row_idx), std::move(values));
    }

    static sparse_col_matrix identity(std::size_t n)
    {
        std::vector<triplet> t;
        for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
        return from_triplets(n, n, std::move(t));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    std::size_t nnz(std::size_t j) const noexcept { return col_ptr_[j + 1] - col_ptr_[j]; }

    std::span<const std::size_t> col_ptr() const noexcept { return col_ptr_; }
    std::span<const std::size_t> row_idx() const noexcept { return row_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    column_view column(std::size_t j) const noexcept
    {
        const auto begin = col_ptr_[j];
        const auto len = col_ptr_[j + 1] - begin;
        return {std::span(row_idx_).subspan(begin, len), std::span(values_).subspan(begin, len)};
    }

    /// <A_:j, y>
    double col_dot(std::size_t j, std::span<const double> y) const noexcept
    {
        const auto col = column(j);
        double sum = 0;
        for (std::size_t k = 0; k < col.size(); ++k) sum += col.values[k] * y[col.rows[k]];
        return sum;
    }

    /// y += alpha * A_:j
    void col_axpy(std::size_t j, double alpha, std::span<double> y) const noexcept
    {
        const auto col = column(j);
        for (std::size_t k = 0; k < col.size(); ++k) y[col.rows[k]] += alpha * col.values[k];
    }

    double col_sq_norm(std::size_t j) const noexcept
    {
        double sum = 0;
        for (double v : column(j).values) sum += v * v;
        return sum;
    }

    /// out = A x
    void multiply(std::span<const double> x, std::span<double> out) const
    {
        require(x.size() == cols_ && out.size() == rows_, "multiply");
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t j = 0; j < cols_; ++j) {
            if (x[j] != 0.0) col_axpy(j, x[j], out);
        }
    }

    std::vector<double> multiply(std::span<const double> x) const
    {
        std::vector<double> out(rows_);
        multiply(x, out);
        return out;
    }

    /// out = A^T y
    void transpose_multiply(std::span<const double> y, std::span<double> out) const
    {
        require(y.size() == rows_ && out.size() == cols_, "transpose_multiply");
        for (std::size_t j = 0; j < cols_; ++j) out[j] = col_dot(j, y);
    }

    std::vector<double> transpose_multiply(std::span<const double> y) const
    {
        std::vector<double> out(cols_);
        transpose_multiply(y, out);
        return out;
    }

    /// Scaled copy, sigma * A.
    sparse_col_matrix scaled(double sigma) const
    {
        auto v = values_;
        for (auto& e : v) e *= sigma;
        return sparse_col_matrix(rows_, cols_, col_ptr_, row_idx_, std::move(v));
    }

    /// Columns [first, last) as a standalone matrix with the same row count.
    sparse_col_matrix column_range(std::size_t first, std::size_t last) const
    {
        std::vector<std::size_t> ptr(last - first + 1);
        for (std::size_t j = first; j <= last; ++j) ptr[j - first] = col_ptr_[j] - col_ptr_[first];
        return sparse_col_matrix(rows_, last - first, std::move(ptr),
            {row_idx_.begin() + col_ptr_[first], row_idx_.begin() + col_ptr_[last]},
            {values_.begin() + col_ptr_[first], values_.begin() + col_ptr_[last]});
    }

    std::vector<triplet> to_triplets() const
    {
        std::vector<triplet> out;
        out.reserve(nnz());
        for (std::size_t j = 0; j < cols_; ++j) {
            const auto col = column(j);
            for (std::size_t k = 0; k < col.size(); ++k) out.push_back({col.rows[k], j, col.values[k]});
        }
        return out;
    }

    friend bool operator==(const sparse_col_matrix&, const sparse_col_matrix&) = default;

private:
    static void require(bool ok, const char* what)
    {
        if (!ok) throw error(error_code::dimension_mismatch, std::string(what) + ": vector length does not match matrix");
    }

    void check_structure() const
    {
        auto fail = [](const std::string& msg) { throw error(error_code::malformed_matrix, msg); };
        if (col_ptr_.size() != cols_ + 1) fail("col_ptr must have cols + 1 entries");
        if (col_ptr_.front() != 0) fail("col_ptr[0] must be 0");
        if (col_ptr_.back() != row_idx_.size() || row_idx_.size() != values_.size()) {
            fail("col_ptr[n] must equal the number of stored entries");
        }
        for (std::size_t j = 0; j < cols_; ++j) {
            if (col_ptr_[j] > col_ptr_[j + 1]) fail("col_ptr must be nondecreasing");
            for (auto k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                if (row_idx_[k] >= rows_) fail("row index out of range in column " + std::to_string(j));
                if (k > col_ptr_[j] && row_idx_[k] <= row_idx_[k - 1]) {
                    fail("row indices must be strictly increasing in column " + std::to_string(j));
                }
                if (values_[k] == 0.0) fail("explicit zero stored in column " + std::to_string(j));
            }
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> col_ptr_;
    std::vector<std::size_t> row_idx_;
    std::vector<double> values_;
};

} // namespace sinnls
