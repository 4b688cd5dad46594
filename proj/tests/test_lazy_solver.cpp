#include <gtest/gtest.h>

#include <numeric>

#include "test_support.hpp"

using namespace sinnls;
using sinnls::testing::identity_instance;
using sinnls::testing::random_instance;
using sinnls::testing::rel_dev;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

double max_rel_dev_vs_naive(const problem_instance& inst, std::size_t steps, std::uint64_t seed)
{
    const std::vector<double> x0(inst.n(), 0.0);
    const auto traj = naive_run(inst, x0, steps, seed);
    lazy_state st(inst, x0, seed);
    double worst = 0;
    for (std::size_t k = 1; k <= steps; ++k) {
        if (k == 1) {
            st.first_step();
        } else {
            st.step();
        }
        worst = std::max(worst, rel_dev(st.x(), traj[k - 1].x));
        worst = std::max(worst, rel_dev(st.output(), traj[k - 1].x_tilde));
    }
    return worst;
}

} // namespace

TEST(LazyState, InitAtZero)
{
    const auto inst = random_instance(10, 12, 0.3, 1);
    const std::vector<double> x0(inst.n(), 0.0);
    lazy_state st(inst, x0, 0);
    for (double v : st.q()) EXPECT_EQ(v, 0.0);
    for (double v : st.s()) EXPECT_EQ(v, 0.0);
    for (double v : st.t()) EXPECT_EQ(v, 0.0);
    for (double v : st.p()) EXPECT_EQ(v, 0.0);
    for (double v : st.r()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(st.iterations(), 0u);
    EXPECT_EQ(st.schedule().k(), 1u);
    EXPECT_EQ(st.data_passes(), 0.0);
}

TEST(LazyState, InitComputesAx0)
{
    const auto id = identity_instance(4);
    const std::vector<double> quarter(4, 0.25);
    lazy_state st(id, quarter, 0);
    EXPECT_EQ(vec(st.q()), quarter);

    const auto inst = random_instance(15, 20, 0.3, 2);
    std::mt19937_64 rng(5);
    const auto x0 = sinnls::testing::random_box_point(inst, rng);
    lazy_state rs(inst, x0, 0);
    EXPECT_EQ(vec(rs.q()), inst.matrix().multiply(x0));
    EXPECT_EQ(rs.data_passes(), 1.0);
}

TEST(LazyState, RejectsStartOutsideBox)
{
    const auto id = identity_instance(4);
    EXPECT_THROW(lazy_state(id, std::vector<double>{0, 0, 0, 1.5}, 0), error);
    EXPECT_THROW(lazy_state(id, std::vector<double>{0, -0.1, 0, 0}, 0), error);
    EXPECT_THROW(lazy_state(id, std::vector<double>{0, 0, 0}, 0), error);
}

TEST(LazyState, StepBeforeFirstStepThrows)
{
    const auto id = identity_instance(4);
    lazy_state st(id, std::vector<double>(4, 0.0), 0);
    EXPECT_THROW(st.step(), error);
}

TEST(LazyState, FirstStepOnIdentity)
{
    const auto id = identity_instance(4);
    lazy_state st(id, std::vector<double>(4, 0.0), 0);
    st.first_step();
    const double a1 = 1.0 / (std::sqrt(2.0) * 8.0);
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_DOUBLE_EQ(st.x()[j], a1);
        EXPECT_NEAR(st.x()[j], 0.08838835, 5e-9);
    }
    EXPECT_EQ(st.output(), vec(st.x()));
    EXPECT_EQ(st.last_touched(), 4u);
    EXPECT_EQ(st.data_passes(), 1.0);
}

TEST(LazyState, FirstStepFromZeroIsScaledUpperBound)
{
    const auto inst = random_instance(20, 30, 0.3, 4);
    lazy_state st(inst, std::vector<double>(inst.n(), 0.0), 0);
    st.first_step();
    const double a1 = step_schedule(inst.n()).a_k();
    for (std::size_t j = 0; j < inst.n(); ++j) {
        EXPECT_NEAR(st.x()[j], a1 * inst.c()[j] / inst.lambda()[j], 1e-15 * inst.upper()[j]);
    }
    EXPECT_EQ(st.output(), vec(st.x()));
}

TEST(LazyState, StationaryCoordinateLeavesStateUnchanged)
{
    // Starting at the optimum x = 1 of I4, every gradient entry is zero.
    const auto id = identity_instance(4);
    lazy_state st(id, std::vector<double>(4, 1.0), 3);
    st.first_step();
    const auto x1 = st.output();
    for (int i = 0; i < 40; ++i) {
        const auto q = vec(st.q());
        const auto s = vec(st.s());
        const auto k = st.schedule().k();
        st.step();
        EXPECT_EQ(vec(st.q()), q);
        EXPECT_EQ(vec(st.s()), s);
        for (double v : st.t()) EXPECT_EQ(v, 0.0);
        EXPECT_EQ(st.schedule().k(), k + 1);
        EXPECT_EQ(st.output(), x1);
    }
}

TEST(LazyState, QTracksAxAfterEveryStep)
{
    const auto inst = random_instance(25, 35, 0.3, 9);
    lazy_state st(inst, std::vector<double>(inst.n(), 0.0), 9);
    st.first_step();
    for (int i = 0; i < 2000; ++i) {
        st.step();
        const auto ax = inst.matrix().multiply(st.x());
        ASSERT_LE(rel_dev(st.q(), ax), 1e-10) << "step " << i;
    }
}

TEST(LazyState, MatchesNaiveOracleOnFixedInstance)
{
    const auto inst = random_instance(20, 30, 0.3, 7);
    EXPECT_LE(max_rel_dev_vs_naive(inst, 500, 7), 1e-9);
}

TEST(LazyState, MatchesNaiveOracleOnRandomInstances)
{
    std::mt19937_64 dims(2024);
    std::uniform_int_distribution<std::size_t> size(5, 40);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto m = size(dims);
        const auto n = std::max<std::size_t>(size(dims), 4);
        const auto inst = random_instance(m, n, 0.3, seed);
        EXPECT_LE(max_rel_dev_vs_naive(inst, 20 * inst.n(), seed), 1e-9) << "seed " << seed;
    }
}

// Averaged output after three iterations against the explicit recursion
// x~_k = (A_{k-1} x~_{k-1} + a_k (n x_k - (n-1) x_{k-1})) / A_k with x~_1 = x_1.
TEST(LazyState, OutputMatchesRecursionAtThirdIteration)
{
    const auto a = sparse_col_matrix::from_triplets(3, 4,
        {{0, 0, 1.0}, {1, 0, 0.5}, {1, 1, 2.0}, {2, 1, 0.3}, {0, 2, 0.7}, {2, 2, 1.1}, {1, 3, 0.4}, {2, 3, 0.9}});
    const auto inst = make_instance(a, std::vector<double>{1.0, 2.0, 1.5}, data_mode::nonnegative);
    ASSERT_EQ(inst.n(), 4u);

    lazy_state st(inst, std::vector<double>(4, 0.0), 11);
    st.first_step();
    const auto x1 = vec(st.x());
    st.step();
    const auto x2 = vec(st.x());
    st.step();
    const auto x3 = vec(st.x());

    step_schedule s(4);
    const double A1 = s.A_k();
    s.advance();
    const double a2 = s.a_k(), A2 = s.A_k();
    s.advance();
    const double a3 = s.a_k(), A3 = s.A_k();

    std::vector<double> xt2(4), xt3(4);
    for (std::size_t j = 0; j < 4; ++j) {
        xt2[j] = (A1 * x1[j] + a2 * (4 * x2[j] - 3 * x1[j])) / A2;
        xt3[j] = (A2 * xt2[j] + a3 * (4 * x3[j] - 3 * x2[j])) / A3;
    }
    EXPECT_LE(rel_dev(st.output(), xt3), 1e-12);
}

TEST(LazyState, DualIterateMatchesNaiveY)
{
    const auto inst = random_instance(20, 25, 0.3, 13);
    const std::vector<double> x0(inst.n(), 0.0);
    const std::size_t steps = 300;
    const auto traj = naive_run(inst, x0, steps, 13);
    lazy_state st(inst, x0, 13);
    for (std::size_t k = 1; k <= steps; ++k) {
        if (k == 1) {
            st.first_step();
        } else {
            st.step();
        }
        const double Ak = st.schedule().A_km1();
        auto y = inst.matrix().multiply(st.x());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += st.s()[i] / Ak;
        ASSERT_LE(rel_dev(y, traj[k - 1].y), 1e-9) << "k=" << k;
    }
}

TEST(NaiveRun, IdentityApproachesOptimum)
{
    const auto id = identity_instance(4);
    const auto traj = naive_run(id, std::vector<double>(4, 0.0), 50, 0);
    ASSERT_EQ(traj.size(), 50u);
    EXPECT_LT(objective(id, traj.back().x_tilde), -1.9);
    EXPECT_EQ(traj.front().x_tilde, traj.front().x);
}

TEST(NaiveRun, Deterministic)
{
    const auto inst = random_instance(10, 15, 0.3, 3);
    const std::vector<double> x0(inst.n(), 0.0);
    const auto a = naive_run(inst, x0, 100, 42);
    const auto b = naive_run(inst, x0, 100, 42);
    for (std::size_t k = 0; k < a.size(); ++k) {
        ASSERT_EQ(a[k].x, b[k].x);
        ASSERT_EQ(a[k].x_tilde, b[k].x_tilde);
        ASSERT_EQ(a[k].y, b[k].y);
    }
}

TEST(LazyState, BoxConfinement)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = random_instance(20, 30, 0.3, seed, 100.0);
        lazy_state st(inst, std::vector<double>(inst.n(), 0.0), seed);
        st.first_step();
        for (int i = 0; i < 3000; ++i) {
            st.step();
            const auto xt = st.output();
            for (std::size_t j = 0; j < inst.n(); ++j) {
                ASSERT_GE(st.x()[j], 0.0);
                ASSERT_LE(st.x()[j], inst.upper()[j]);
                ASSERT_GE(xt[j], 0.0);
                ASSERT_LE(xt[j], inst.upper()[j]);
            }
        }
    }
}

TEST(LazyState, TouchedNonzerosPerStep)
{
    const auto inst = random_instance(30, 40, 0.2, 6);
    lazy_state st(inst, std::vector<double>(inst.n(), 0.0), 6);
    st.first_step();
    EXPECT_EQ(st.touched_nonzeros(), inst.nnz());
    std::size_t total = inst.nnz();
    for (int i = 0; i < 500; ++i) {
        const auto j = st.step();
        ASSERT_EQ(st.last_touched(), inst.matrix().nnz(j));
        total += inst.matrix().nnz(j);
    }
    EXPECT_EQ(st.touched_nonzeros(), total);
    EXPECT_DOUBLE_EQ(st.data_passes(), static_cast<double>(total) / static_cast<double>(inst.nnz()));
}

TEST(LazyState, RestartResetsAuxiliaries)
{
    const auto inst = random_instance(15, 20, 0.3, 8);
    lazy_state st(inst, std::vector<double>(inst.n(), 0.0), 8);
    st.first_step();
    for (int i = 0; i < 100; ++i) st.step();
    const auto anchor = st.output();
    const auto passes = st.touched_nonzeros();
    st.restart(anchor);
    EXPECT_EQ(st.iterations(), 0u);
    EXPECT_EQ(st.schedule().k(), 1u);
    EXPECT_EQ(vec(st.x0()), anchor);
    EXPECT_EQ(vec(st.q()), inst.matrix().multiply(anchor));
    for (double v : st.p()) EXPECT_EQ(v, 0.0);
    for (double v : st.r()) EXPECT_EQ(v, 0.0);
    for (double v : st.s()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(st.touched_nonzeros(), passes + inst.nnz());
}

TEST(SolvePlain, IdentityMeetsMultiplicativeTarget)
{
    const auto id = identity_instance(4);
    double sum = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        plain_options opt;
        opt.epsilon = 0.01;
        opt.seed = seed;
        sum += solve_plain(id, {}, opt).sol.objective;
    }
    EXPECT_LE(sum / 20.0, -2.0 * (1.0 - 0.02));
}

TEST(SolvePlain, MetricsCadence)
{
    const auto id = identity_instance(4);
    const auto res = solve_plain(id, {}, {});
    const auto iters = horizon(4, 0.01);
    EXPECT_EQ(res.sol.iterations, iters);
    EXPECT_EQ(res.metrics.records.size(), (iters + 3) / 4 + 1);
    EXPECT_EQ(res.metrics.records.back().iter, iters);
    EXPECT_FALSE(res.sol.budget_exhausted);
    for (std::size_t i = 1; i < res.metrics.records.size(); ++i) {
        EXPECT_GT(res.metrics.records[i].iter, res.metrics.records[i - 1].iter);
        EXPECT_GE(res.metrics.records[i].data_passes, res.metrics.records[i - 1].data_passes);
    }
}

TEST(SolvePlain, IterationCapFlagsExhaustion)
{
    const auto id = identity_instance(4);
    plain_options opt;
    opt.max_iters = 10;
    const auto res = solve_plain(id, {}, opt);
    EXPECT_EQ(res.sol.iterations, 10u);
    EXPECT_TRUE(res.sol.budget_exhausted);
    EXPECT_THROW(solve_plain(id, {}, plain_options{.epsilon = 0.0}), error);
}

TEST(SolvePlain, AllColumnsDroppedIsTrivial)
{
    const auto inst = make_instance(sparse_col_matrix::identity(3), std::vector<double>{-1, -1, 0},
                                    data_mode::nonnegative);
    const auto res = solve_plain(inst, {}, {});
    EXPECT_EQ(res.sol.x, std::vector<double>(3, 0.0));
    EXPECT_EQ(res.sol.iterations, 0u);
}

TEST(SolvePlain, Deterministic)
{
    const auto inst = random_instance(20, 30, 0.3, 1);
    plain_options opt;
    opt.seed = 17;
    const auto a = solve_plain(inst, {}, opt);
    const auto b = solve_plain(inst, {}, opt);
    EXPECT_EQ(a.sol.x, b.sol.x);
    ASSERT_EQ(a.metrics.records.size(), b.metrics.records.size());
    for (std::size_t i = 0; i < a.metrics.records.size(); ++i) {
        EXPECT_EQ(a.metrics.records[i].objective, b.metrics.records[i].objective);
    }
}

TEST(SolvePlain, ScaleInvariance)
{
    synth_params p;
    p.m = 30;
    p.n = 50;
    p.seed = 4;
    const auto data = make_synthetic(p);
    const auto base = make_instance(data.matrix, data.labels, data_mode::nonnegative);
    plain_options opt;
    opt.seed = 5;
    const auto ref = solve_plain(base, {}, opt);

    for (double sigma : {1e-3, 1e3}) {
        auto b = data.labels;
        for (auto& v : b) v *= sigma;
        const auto scaled = make_instance(data.matrix.scaled(sigma), b, data_mode::nonnegative);
        const auto res = solve_plain(scaled, {}, opt);
        EXPECT_LE(rel_dev(res.sol.x, ref.sol.x), 1e-8) << "sigma " << sigma;
        ASSERT_EQ(res.metrics.records.size(), ref.metrics.records.size());
        for (std::size_t i = 0; i < res.metrics.records.size(); ++i) {
            const double f = ref.metrics.records[i].objective;
            EXPECT_NEAR(res.metrics.records[i].objective / (sigma * sigma), f, 1e-8 * std::abs(f));
        }
    }
}

TEST(BlockPartition, SingletonBlocksReproduceCoordinateSteps)
{
    const auto inst = random_instance(20, 30, 0.3, 12);
    const std::vector<double> x0(inst.n(), 0.0);
    const auto part = block_partition::contiguous(inst, 1);
    ASSERT_EQ(part.blocks(), inst.n());
    for (std::size_t j = 0; j < inst.n(); ++j) EXPECT_EQ(part.block_norms[j], inst.lambda()[j]);

    lazy_state plain(inst, x0, 12);
    lazy_state blocked(inst, x0, 12, part);
    plain.first_step();
    blocked.first_step();
    for (int i = 0; i < 600; ++i) {
        ASSERT_EQ(plain.step(), blocked.step());
    }
    EXPECT_EQ(vec(plain.x()), vec(blocked.x()));
    EXPECT_EQ(plain.output(), blocked.output());
}

TEST(BlockPartition, NormsDominateMemberColumns)
{
    const auto inst = random_instance(30, 45, 0.3, 2, 50.0);
    for (std::size_t size : {2u, 5u, 7u, 45u}) {
        const auto part = block_partition::contiguous(inst, size);
        EXPECT_EQ(part.starts.back(), inst.n());
        for (std::size_t b = 0; b < part.blocks(); ++b) {
            for (auto j = part.first(b); j < part.last(b); ++j) EXPECT_GE(part.block_norms[b], inst.lambda()[j]);
        }
    }
    EXPECT_THROW(block_partition::contiguous(inst, 0), error);
}

// Orthogonal columns: each block norm is its largest member norm and the
// block update of coordinate j depends on column j alone.
TEST(BlockPartition, OrthogonalColumnsDecouple)
{
    const auto a = sparse_col_matrix::from_triplets(4, 4, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 1.5}, {3, 3, 0.5}});
    const std::vector<double> b{1.0, 1.0, 2.0, 3.0};
    const auto inst = make_instance(a, b, data_mode::nonnegative);
    const auto part = block_partition::contiguous(inst, 2);
    ASSERT_EQ(part.blocks(), 2u);
    EXPECT_NEAR(part.block_norms[0], 4.0, 1e-12);
    EXPECT_NEAR(part.block_norms[1], 2.25, 1e-12);

    lazy_state st(inst, std::vector<double>(4, 0.0), 0, part);
    st.first_step();
    const double a1 = 0.25; // two sampling units
    const double a2 = 0.25;
    std::vector<double> x1(4);
    for (std::size_t j = 0; j < 4; ++j) {
        const double norm = part.block_norms[j / 2];
        x1[j] = std::min(a1 * inst.c()[j] / norm, inst.upper()[j]);
        EXPECT_DOUBLE_EQ(st.x()[j], x1[j]);
    }
    const auto after_first = vec(st.x());

    st.step_unit(0);
    for (std::size_t j = 0; j < 2; ++j) {
        const double g1 = -inst.c()[j];
        const double g2 = inst.lambda()[j] * x1[j] * (1.0 + a1 / a2) - inst.c()[j];
        const double p = a1 * g1 + 2.0 * a2 * g2;
        const double expect = std::clamp(-p / part.block_norms[0], 0.0, inst.upper()[j]);
        EXPECT_NEAR(st.x()[j], expect, 1e-15);
    }
    EXPECT_EQ(st.x()[2], after_first[2]);
    EXPECT_EQ(st.x()[3], after_first[3]);
}

TEST(BlockPartition, BlockRunConvergesInBox)
{
    const auto inst = random_instance(30, 60, 0.3, 3);
    plain_options opt;
    opt.block_size = 4;
    opt.epsilon = 1e-4;
    const auto res = solve_plain(inst, {}, opt);
    const double fstar = sinnls::testing::reference_optimum(inst);
    EXPECT_LE((res.sol.objective - fstar) / std::abs(fstar), 1e-2);
    for (std::size_t j = 0; j < inst.n(); ++j) {
        EXPECT_GE(res.sol.x[inst.retained()[j]], 0.0);
        EXPECT_LE(res.sol.x[inst.retained()[j]], inst.upper()[j]);
    }
}
