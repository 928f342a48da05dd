#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/walk.hpp"

using namespace rwre;

namespace {

Trajectory straight_walk(int dim, std::size_t n) {
    Trajectory t;
    t.dim = dim;
    t.steps.assign(n, 0);
    return t;
}

Trajectory path_from_levels(const std::vector<int>& xs) {
    std::vector<Site> path;
    for (int x : xs) path.push_back(make_site({x, 0}));
    return Trajectory::from_positions(2, path);
}

}  // namespace

TEST(Step, PointMassAlwaysMovesForward) {
    RealizedEnvironment env(EnvironmentLaw::point_mass(2, 0), 1);
    SplitMix64 rng(3);
    Site x = make_site({4, -2});
    for (int i = 0; i < 1000; ++i) {
        const Site y = step(env, x, rng);
        ASSERT_EQ(y, neighbor(2, x, 0));
        x = y;
    }
}

TEST(Step, HomogeneousFrequencies) {
    const std::vector<double> p{0.7, 0.1, 0.1, 0.1};
    RealizedEnvironment env(EnvironmentLaw::homogeneous(p), 1);
    SplitMix64 rng(77);
    std::array<int, 4> counts{};
    const int n = 1000000;
    const Site x = make_site({0, 0});
    for (int i = 0; i < n; ++i) {
        const Site y = step(env, x, rng);
        for (int e = 0; e < 4; ++e) {
            if (neighbor(2, x, e) == y) ++counts[static_cast<std::size_t>(e)];
        }
    }
    for (int e = 0; e < 4; ++e) {
        const double pe = p[static_cast<std::size_t>(e)];
        const double se = std::sqrt(pe * (1 - pe) / n);
        EXPECT_NEAR(counts[static_cast<std::size_t>(e)] / double(n), pe, 3 * se);
    }
}

TEST(Step, ReplayIsDeterministic) {
    const auto law = EnvironmentLaw::dirichlet({1, 1, 1, 1});
    RealizedEnvironment a(law, 5), b(law, 5);
    SplitMix64 ra(9), rb(9);
    const auto ta = simulate_trajectory(a, Site{}, 5000, ra);
    const auto tb = simulate_trajectory(b, Site{}, 5000, rb);
    EXPECT_EQ(ta.steps, tb.steps);
}

TEST(SampleStep, InverseCdfOrder) {
    const double p[4] = {0.25, 0.0, 0.5, 0.25};
    EXPECT_EQ(sample_step(p, 4, 0.0), 0);
    EXPECT_EQ(sample_step(p, 4, 0.2499), 0);
    EXPECT_EQ(sample_step(p, 4, 0.25), 2);
    EXPECT_EQ(sample_step(p, 4, 0.7499), 2);
    EXPECT_EQ(sample_step(p, 4, 0.75), 3);
    EXPECT_EQ(sample_step(p, 4, 0.9999999), 3);
}

TEST(RunUntilExit, Examples) {
    RealizedEnvironment env(EnvironmentLaw::point_mass(2, 0), 1);
    const Region box(RotatedBox{Rotation::identity(2), 5, 5, 5});
    SplitMix64 rng(1);
    const auto out = run_until_exit(env, box, Site{}, rng, 100);
    EXPECT_FALSE(out.timed_out);
    EXPECT_EQ(out.exit_time, 5u);
    EXPECT_EQ(out.exit_site, make_site({5, 0}));
    EXPECT_EQ(out.boundary, BoundaryClass::Front);

    EXPECT_THROW(run_until_exit(env, box, make_site({9, 0}), rng, 100), std::invalid_argument);
    EXPECT_TRUE(run_until_exit(env, box, Site{}, rng, 0).timed_out);
}

TEST(HittingTimes, Examples) {
    const auto t = straight_walk(2, 10);
    const auto l = Direction::axis(2, 0);
    EXPECT_EQ(hitting_times(t, l, 3.0).forward, std::optional<std::size_t>(3));
    EXPECT_FALSE(hitting_times(t, l, -1.0).backward.has_value());
    const auto hand = path_from_levels({0, 1, 0, -1});
    EXPECT_EQ(hitting_times(hand, l, -1.0).backward, std::optional<std::size_t>(3));
    EXPECT_EQ(hitting_times(hand, l, 0.0).backward, std::optional<std::size_t>(0));
}

TEST(Regeneration, StraightWalk) {
    const auto params = RegenerationParams::with_default_a(Direction::axis(2, 0));
    const auto rec = detect_regenerations(straight_walk(2, 10), params);
    ASSERT_GE(rec.times.size(), 2u);
    EXPECT_EQ(rec.times[0], 4u);
    EXPECT_EQ(rec.times[1], 8u);
    EXPECT_EQ(rec.radii[0], 4);
    EXPECT_TRUE(rec.censored_tail);
}

TEST(Regeneration, RejectsParametersAtTheBound) {
    EXPECT_THROW(RegenerationParams(Direction::axis(2, 0), 2.0 * std::sqrt(2.0)), std::invalid_argument);
}

TEST(Regeneration, EmptyTrajectory) {
    const auto params = RegenerationParams::with_default_a(Direction::axis(2, 0));
    const auto rec = detect_regenerations(Trajectory{}, params);
    EXPECT_TRUE(rec.times.empty());
    EXPECT_TRUE(rec.radii.empty());
}

TEST(Regeneration, HandPathWithDip) {
    // Level 3 is reached at n=3 and left downwards at n=4, so that candidate
    // is rejected; the running maximum 3 moves the next target to 6 (n=8).
    const RegenerationParams params(Direction::axis(2, 0), 3.0);
    const auto t = path_from_levels({0, 1, 2, 3, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13});
    const auto rec = detect_regenerations(t, params);
    ASSERT_FALSE(rec.times.empty());
    EXPECT_EQ(rec.times[0], 8u);
    EXPECT_EQ(rec.radii[0], 6);
    EXPECT_EQ(rec.times, oracle::literal_regenerations(oracle::levels(t, params.direction()), 3.0));
}

TEST(Regeneration, MatchesLiteralRecursionOnRandomPaths) {
    const auto law = EnvironmentLaw::homogeneous({0.4, 0.2, 0.2, 0.2});
    std::vector<Direction> dirs{Direction::axis(2, 0), Direction::normalized({2, 1})};
    for (int r = 0; r < 300; ++r) {
        RealizedEnvironment env(law, 1);
        SplitMix64 rng(derive_seed(12, static_cast<std::uint64_t>(r)));
        const auto t = simulate_trajectory(env, Site{}, 400, rng);
        for (const auto& l : dirs) {
            const auto params = RegenerationParams::with_default_a(l);
            const auto rec = detect_regenerations(t, params);
            ASSERT_EQ(rec.times, oracle::literal_regenerations(oracle::levels(t, l), params.a())) << "replica " << r;
        }
    }
}

TEST(Regeneration, StructuralInvariants) {
    const auto law = EnvironmentLaw::dirichlet({2, 1, 1, 1});
    const auto l = Direction::axis(2, 0);
    const auto params = RegenerationParams::with_default_a(l);
    for (int r = 0; r < 1000; ++r) {
        RealizedEnvironment env(law, derive_seed(3, static_cast<std::uint64_t>(r), 0));
        SplitMix64 rng(derive_seed(3, static_cast<std::uint64_t>(r), 1));
        const auto t = simulate_trajectory(env, Site{}, 600, rng);
        const auto rec = detect_regenerations(t, params);
        const auto pos = t.positions();
        ASSERT_EQ(rec.times.size(), rec.positions.size());
        ASSERT_EQ(rec.times.size(), rec.radii.size());
        for (std::size_t k = 0; k < rec.times.size(); ++k) {
            const auto tk = rec.times[k];
            ASSERT_EQ(rec.positions[k], pos[tk]);
            const double level = l.dot(pos[tk]);
            if (k + 1 < rec.times.size()) {
                ASSERT_GE(l.dot(pos[rec.times[k + 1]]), level + params.a());
            }
            for (std::size_t n = tk; n < pos.size(); ++n) ASSERT_GE(l.dot(pos[n]), level);
            const std::size_t from = k == 0 ? 0 : rec.times[k - 1];
            int radius = 0;
            for (std::size_t n = from; n <= tk; ++n) radius = std::max(radius, l1_distance(2, pos[n], pos[from]));
            ASSERT_EQ(rec.radii[k], radius);
        }
    }
}

TEST(Regeneration, AppendingNonDroppingStepsKeepsRecords) {
    const auto law = EnvironmentLaw::dirichlet({2, 1, 1, 1});
    const auto params = RegenerationParams::with_default_a(Direction::axis(2, 0));
    for (int r = 0; r < 200; ++r) {
        RealizedEnvironment env(law, derive_seed(4, static_cast<std::uint64_t>(r), 0));
        SplitMix64 rng(derive_seed(4, static_cast<std::uint64_t>(r), 1));
        auto t = simulate_trajectory(env, Site{}, 500, rng);
        const auto before = detect_regenerations(t, params);
        t.steps.insert(t.steps.end(), 50, 0);
        const auto after = detect_regenerations(t, params);
        ASSERT_GE(after.times.size(), before.times.size());
        for (std::size_t k = 0; k < before.times.size(); ++k) {
            ASSERT_EQ(after.times[k], before.times[k]);
            ASSERT_EQ(after.radii[k], before.radii[k]);
        }
    }
}

TEST(Blocks, PointMassIncrements) {
    const auto params = RegenerationParams::with_default_a(Direction::axis(2, 0));
    const auto s = simulate_regeneration_blocks(EnvironmentLaw::point_mass(2, 0), params, 50, 100, 1);
    ASSERT_GE(s.durations.size(), 50u);
    for (std::size_t k = 0; k < s.durations.size(); ++k) {
        EXPECT_EQ(s.durations[k], 4.0);
        EXPECT_EQ(s.displacements[k][0], 4.0);
        EXPECT_EQ(s.displacements[k][1], 0.0);
    }
    for (double f : s.first_durations) EXPECT_EQ(f, 4.0);
}

TEST(Blocks, HomogeneousDriftRatio) {
    const auto params = RegenerationParams::with_default_a(Direction::axis(2, 0));
    const auto s = simulate_regeneration_blocks(EnvironmentLaw::homogeneous({0.7, 0.1, 0.1, 0.1}), params, 20000,
                                                2000, 7);
    std::vector<double> dx;
    for (const auto& d : s.displacements) dx.push_back(d[0]);
    const auto est = batch_means_ratio(dx, s.durations, 30);
    EXPECT_NEAR(est.value, 0.6, 3 * est.std_error);
    EXPECT_LT(est.std_error, 0.01);
}

TEST(Blocks, BudgetExhaustedUnderSymmetricLaw) {
    const auto params = RegenerationParams::with_default_a(Direction::axis(2, 0));
    EXPECT_THROW(simulate_regeneration_blocks(EnvironmentLaw::uniform(2), params, 100000, 50, 1, 1, 20),
                 BudgetExhausted);
}

TEST(FirstRegeneration, PointMassIsDeterministic) {
    const auto params = RegenerationParams::with_default_a(Direction::axis(2, 0));
    const auto s = first_regeneration_samples(EnvironmentLaw::point_mass(2, 0), params, 20, 100, 1);
    for (std::size_t i = 0; i < s.tau.size(); ++i) {
        EXPECT_EQ(s.tau[i], 4.0);
        EXPECT_EQ(s.censored[i], 0);
    }
}

TEST(Lln, HomogeneousSpeed) {
    const auto pts = lln_profile(EnvironmentLaw::homogeneous({0.7, 0.1, 0.1, 0.1}), Direction::axis(2, 0),
                                 {100, 1000}, 400, 3);
    ASSERT_EQ(pts.size(), 2u);
    for (const auto& p : pts) EXPECT_NEAR(p.mean, 0.6, 3 * p.std_error);
}
