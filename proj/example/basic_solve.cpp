// Solve a small nonnegative least squares problem and print the solution.
#include <cstdio>
#include <vector>

#include <sinnls/sinnls.hpp>

int main()
{
    // A is 3x3, b = A * (1, 0, 2) + 0.1.
    const auto a = sinnls::sparse_col_matrix::from_triplets(3, 3,
        {{0, 0, 1.0}, {1, 0, 0.5}, {1, 1, 2.0}, {2, 1, 1.0}, {0, 2, 0.3}, {2, 2, 1.5}});
    const std::vector<double> b{1.7, 0.6, 3.1};

    const auto inst = sinnls::make_instance(a, b, sinnls::data_mode::nonnegative);

    sinnls::restart_config cfg;
    cfg.target_residual = 1e-10;
    const auto res = sinnls::solve_restarted(inst, {}, cfg);

    for (std::size_t j = 0; j < res.sol.x.size(); ++j) std::printf("x[%zu] = %.6f\n", j, res.sol.x[j]);
    std::printf("objective %.6f, residual %.2e, %zu restarts, %.1f data passes\n", res.sol.objective,
                res.sol.residual, res.sol.restarts, res.sol.data_passes);
    return res.sol.budget_exhausted ? 1 : 0;
}
