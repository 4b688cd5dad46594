#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "sparse_matrix.hpp"

namespace sinnls {

/// Rows are samples, columns are features; labels has one entry per row.
struct dataset
{
    sparse_col_matrix matrix;
    std::vector<double> labels;
    std::vector<std::string> warnings;
};

/// Shortest form that reads back to the same double (17 significant digits).
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<std::size_t> parse_index(std::string_view s)
{
    if (s.empty()) return std::nullopt;
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

[[noreturn]] inline void parse_fail(std::size_t line, std::size_t column, const std::string& what)
{
    throw error(error_code::parse_error,
        "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

struct token
{
    std::string_view text;
    std::size_t column; // 1-based
};

inline std::vector<token> split_ws(std::string_view line)
{
    std::vector<token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const auto begin = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > begin) out.push_back({line.substr(begin, i - begin), begin + 1});
    }
    return out;
}

inline std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw error(error_code::io_error, "cannot open " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw error(error_code::io_error, "cannot write " + path);
    return out;
}

} // namespace detail

/**
 * Parses LibSVM text: one sample per line, "label idx:val idx:val ...",
 * 1-based strictly increasing feature indices. Blank lines and lines
 * starting with '#' are skipped, as is anything after a '#'. Zero values
 * are not stored. The feature count is the largest index seen unless
 * `n_features` is given.
 */
inline dataset parse_libsvm(std::istream& in, std::optional<std::size_t> n_features = std::nullopt)
{
    dataset out;
    std::vector<triplet> entries;
    std::size_t max_index = 0;
    std::size_t row = 0;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        const auto tokens = detail::split_ws(view);
        if (tokens.empty()) continue;

        const auto label = detail::parse_double(tokens[0].text);
        if (!label) detail::parse_fail(line_no, tokens[0].column, "bad label '" + std::string(tokens[0].text) + "'");
        out.labels.push_back(*label);

        std::size_t prev = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto text = tokens[t].text;
            const auto colon = text.find(':');
            if (colon == std::string_view::npos) {
                detail::parse_fail(line_no, tokens[t].column, "expected idx:val, got '" + std::string(text) + "'");
            }
            const auto idx = detail::parse_index(text.substr(0, colon));
            if (!idx || *idx == 0) {
                detail::parse_fail(line_no, tokens[t].column, "bad feature index in '" + std::string(text) + "'");
            }
            const auto val = detail::parse_double(text.substr(colon + 1));
            if (!val) {
                detail::parse_fail(line_no, tokens[t].column + colon + 1, "bad value in '" + std::string(text) + "'");
            }
            if (*idx <= prev) {
                detail::parse_fail(line_no, tokens[t].column, "feature indices must be strictly increasing");
            }
            prev = *idx;
            max_index = std::max(max_index, *idx);
            if (*val != 0.0) entries.push_back({row, *idx - 1, *val});
        }
        ++row;
    }
    if (row == 0) throw error(error_code::parse_error, "no samples in LibSVM input");
    std::size_t cols = max_index;
    if (n_features) {
        if (*n_features < max_index) {
            throw error(error_code::parse_error,
                "feature index " + std::to_string(max_index) + " exceeds declared dimension "
                + std::to_string(*n_features));
        }
        cols = *n_features;
    }
    out.matrix = sparse_col_matrix::from_triplets(row, cols, std::move(entries));
    return out;
}

inline dataset read_libsvm(const std::string& path, std::optional<std::size_t> n_features = std::nullopt)
{
    auto in = detail::open_input(path);
    return parse_libsvm(in, n_features);
}

/// Labels: one value per non-blank line.
inline std::vector<double> parse_labels(std::istream& in)
{
    std::vector<double> labels;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        const auto view = detail::trim(line);
        if (view.empty() || view.front() == '#' || view.front() == '%') continue;
        const auto v = detail::parse_double(view);
        if (!v) detail::parse_fail(line_no, 1, "bad label '" + std::string(view) + "'");
        labels.push_back(*v);
    }
    return labels;
}

/**
 * MatrixMarket "coordinate real general" (integer values accepted), 1-based.
 * Duplicate entries are summed and reported in `warnings`.
 */
inline dataset parse_matrix_market(std::istream& matrix_in, std::istream& labels_in)
{
    std::string line;
    if (!std::getline(matrix_in, line)) throw error(error_code::parse_error, "empty MatrixMarket file");
    {
        std::string lower(line);
        std::transform(lower.begin(), lower.end(), lower.begin(),
            [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        const auto tokens = detail::split_ws(lower);
        const bool ok = tokens.size() == 5 && tokens[0].text == "%%matrixmarket" && tokens[1].text == "matrix"
            && tokens[2].text == "coordinate" && (tokens[3].text == "real" || tokens[3].text == "integer")
            && tokens[4].text == "general";
        if (!ok) {
            throw error(error_code::parse_error,
                "line 1: expected '%%MatrixMarket matrix coordinate real general' banner");
        }
    }

    std::size_t line_no = 1;
    std::optional<std::vector<std::size_t>> size;
    while (std::getline(matrix_in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty() || view.front() == '%') continue;
        const auto tokens = detail::split_ws(view);
        if (tokens.size() != 3) detail::parse_fail(line_no, 1, "expected 'rows cols nnz'");
        std::vector<std::size_t> dims;
        for (const auto& t : tokens) {
            const auto v = detail::parse_index(t.text);
            if (!v) detail::parse_fail(line_no, t.column, "bad size entry '" + std::string(t.text) + "'");
            dims.push_back(*v);
        }
        size = dims;
        break;
    }
    if (!size) throw error(error_code::parse_error, "missing MatrixMarket size line");
    const auto rows = (*size)[0];
    const auto cols = (*size)[1];
    const auto count = (*size)[2];

    std::vector<triplet> entries;
    entries.reserve(count);
    while (std::getline(matrix_in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty() || view.front() == '%') continue;
        const auto tokens = detail::split_ws(view);
        if (tokens.size() != 3) detail::parse_fail(line_no, 1, "expected 'row col value'");
        const auto i = detail::parse_index(tokens[0].text);
        const auto j = detail::parse_index(tokens[1].text);
        const auto v = detail::parse_double(tokens[2].text);
        if (!i || *i == 0 || *i > rows) detail::parse_fail(line_no, tokens[0].column, "row index out of range");
        if (!j || *j == 0 || *j > cols) detail::parse_fail(line_no, tokens[1].column, "column index out of range");
        if (!v) detail::parse_fail(line_no, tokens[2].column, "bad value '" + std::string(tokens[2].text) + "'");
        if (entries.size() == count) detail::parse_fail(line_no, 1, "more entries than declared");
        entries.push_back({*i - 1, *j - 1, *v});
    }
    if (entries.size() != count) {
        throw error(error_code::parse_error,
            "declared " + std::to_string(count) + " entries, found " + std::to_string(entries.size()));
    }

    dataset out;
    std::size_t duplicates = 0;
    out.matrix = sparse_col_matrix::from_triplets(rows, cols, std::move(entries), &duplicates);
    if (duplicates > 0) {
        out.warnings.push_back(std::to_string(duplicates) + " duplicate MatrixMarket entries summed");
    }
    out.labels = parse_labels(labels_in);
    if (out.labels.size() != rows) {
        throw error(error_code::dimension_mismatch,
            "labels file has " + std::to_string(out.labels.size()) + " values, matrix has "
            + std::to_string(rows) + " rows");
    }
    return out;
}

inline dataset read_matrix_market(const std::string& matrix_path, const std::string& labels_path)
{
    auto m = detail::open_input(matrix_path);
    auto l = detail::open_input(labels_path);
    return parse_matrix_market(m, l);
}

/**
 * Dense CSV: each line is "label,v_1,...,v_n". A first line whose first
 * field is not numeric is treated as a header. Zeros are not stored.
 */
inline dataset parse_dense_csv(std::istream& in)
{
    dataset out;
    std::vector<triplet> entries;
    std::optional<std::size_t> width;
    std::size_t row = 0;
    std::string line;
    bool first = true;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        const auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            fields.push_back(detail::trim(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (first && !detail::parse_double(fields[0])) {
            first = false;
            continue;
        }
        first = false;
        if (fields.size() < 2) detail::parse_fail(line_no, 1, "expected a label and at least one feature");
        if (width && *width != fields.size() - 1) detail::parse_fail(line_no, 1, "inconsistent number of fields");
        width = fields.size() - 1;
        for (std::size_t f = 0; f < fields.size(); ++f) {
            const auto v = detail::parse_double(fields[f]);
            if (!v) detail::parse_fail(line_no, f + 1, "bad number '" + std::string(fields[f]) + "' in field");
            if (f == 0) {
                out.labels.push_back(*v);
            } else if (*v != 0.0) {
                entries.push_back({row, f - 1, *v});
            }
        }
        ++row;
    }
    if (row == 0) throw error(error_code::parse_error, "no rows in CSV input");
    out.matrix = sparse_col_matrix::from_triplets(row, *width, std::move(entries));
    return out;
}

inline dataset read_dense_csv(const std::string& path)
{
    auto in = detail::open_input(path);
    return parse_dense_csv(in);
}

inline void write_libsvm(std::ostream& out, const dataset& data)
{
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(data.matrix.rows());
    for (const auto& t : data.matrix.to_triplets()) rows[t.row].emplace_back(t.col, t.value);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << format_double(data.labels[i]);
        for (const auto& [j, v] : rows[i]) out << ' ' << (j + 1) << ':' << format_double(v);
        out << '\n';
    }
}

inline void write_matrix_market(std::ostream& matrix_out, std::ostream& labels_out, const dataset& data)
{
    matrix_out << "%%MatrixMarket matrix coordinate real general\n";
    matrix_out << data.matrix.rows() << ' ' << data.matrix.cols() << ' ' << data.matrix.nnz() << '\n';
    for (const auto& t : data.matrix.to_triplets()) {
        matrix_out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << format_double(t.value) << '\n';
    }
    for (double b : data.labels) labels_out << format_double(b) << '\n';
}

inline constexpr std::string_view metrics_header = "iter,data_passes,wall_s,objective,natural_residual,event";

inline void write_metrics(std::ostream& out, const run_metrics& metrics)
{
    out << metrics_header << '\n';
    for (const auto& r : metrics.records) {
        out << r.iter << ',' << format_double(r.data_passes) << ',' << format_double(r.wall_s) << ','
            << format_double(r.objective) << ',' << format_double(r.natural_residual) << ','
            << (r.event == metric_event::restart ? "restart" : "") << '\n';
    }
}

inline void write_metrics(const run_metrics& metrics, const std::string& path)
{
    auto out = detail::open_output(path);
    write_metrics(out, metrics);
    if (!out) throw error(error_code::io_error, "failed writing " + path);
}

inline run_metrics parse_metrics(std::istream& in)
{
    run_metrics metrics;
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != metrics_header) {
        throw error(error_code::parse_error, "line 1: missing metrics header");
    }
    for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
        if (detail::trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view view(line);
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            fields.push_back(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 6) detail::parse_fail(line_no, 1, "expected 6 fields");
        metrics_record r;
        const auto iter = detail::parse_index(fields[0]);
        if (!iter) detail::parse_fail(line_no, 1, "bad iteration index");
        r.iter = *iter;
        double* targets[] = {&r.data_passes, &r.wall_s, &r.objective, &r.natural_residual};
        for (std::size_t f = 0; f < 4; ++f) {
            const auto v = detail::parse_double(fields[f + 1]);
            if (!v) detail::parse_fail(line_no, f + 2, "bad number");
            *targets[f] = *v;
        }
        const auto event = detail::trim(fields[5]);
        if (event == "restart") {
            r.event = metric_event::restart;
        } else if (!event.empty()) {
            detail::parse_fail(line_no, 6, "unknown event '" + std::string(event) + "'");
        }
        metrics.records.push_back(r);
    }
    return metrics;
}

inline run_metrics read_metrics(const std::string& path)
{
    auto in = detail::open_input(path);
    return parse_metrics(in);
}

/// "index,value" rows (1-based original column index) for nonzero x, then a '#' summary line.
inline void write_solution(std::ostream& out, const solution& sol)
{
    out << "index,value\n";
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
        if (sol.x[j] != 0.0) out << (j + 1) << ',' << format_double(sol.x[j]) << '\n';
    }
    out << "# f_obj=" << format_double(sol.objective) << " residual=" << format_double(sol.residual)
        << " iters=" << sol.iterations << " restarts=" << sol.restarts
        << " data_passes=" << format_double(sol.data_passes) << '\n';
}

inline void write_solution(const solution& sol, const std::string& path)
{
    auto out = detail::open_output(path);
    write_solution(out, sol);
    if (!out) throw error(error_code::io_error, "failed writing " + path);
}

} // namespace sinnls
