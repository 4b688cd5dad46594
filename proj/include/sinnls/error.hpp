#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sinnls {

enum class error_code {
    negative_entry,
    empty_matrix,
    zero_column,
    malformed_matrix,
    dimension_mismatch,
    invalid_argument,
    out_of_box,
    parse_error,
    io_error,
};

inline std::string_view to_string(error_code code)
{
    switch (code) {
        case error_code::negative_entry:     return "NegativeEntry";
        case error_code::empty_matrix:       return "EmptyMatrix";
        case error_code::zero_column:        return "ZeroColumn";
        case error_code::malformed_matrix:   return "MalformedMatrix";
        case error_code::dimension_mismatch: return "DimensionMismatch";
        case error_code::invalid_argument:   return "InvalidArgument";
        case error_code::out_of_box:         return "OutOfBox";
        case error_code::parse_error:        return "ParseError";
        case error_code::io_error:           return "IoError";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable code; what() is prefixed with the code name.
class error : public std::runtime_error
{
public:
    error(error_code code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code)
    {}

    error_code code() const noexcept { return code_; }

private:
    error_code code_;
};

} // namespace sinnls
