#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "model.hpp"

namespace sinnls {

/// R(x) = x - (x - Lambda^{-1} grad f(x))_+ ; zero exactly at solutions.
inline std::vector<double> natural_map(const problem_instance& inst, std::span<const double> x)
{
    auto map = gradient(inst, x);
    const auto lambda = inst.lambda();
    for (std::size_t j = 0; j < map.size(); ++j) {
        map[j] = x[j] - std::max(x[j] - map[j] / lambda[j], 0.0);
    }
    return map;
}

/// r(x) = |R(x)|_Lambda
inline double natural_residual(const problem_instance& inst, std::span<const double> x)
{
    const auto map = natural_map(inst, x);
    const auto lambda = inst.lambda();
    double sum = 0;
    for (std::size_t j = 0; j < map.size(); ++j) sum += lambda[j] * map[j] * map[j];
    return std::sqrt(sum);
}

} // namespace sinnls
