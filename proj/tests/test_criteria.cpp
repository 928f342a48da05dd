#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/criteria.hpp"

using namespace rwre;

namespace {

const Direction e1 = Direction::axis(2, 0);

PolynomialConditionConfig pm_config(double L, double M) {
    PolynomialConditionConfig c;
    c.l = e1;
    c.L = L;
    c.Ltilde = L;
    c.M = M;
    return c;
}

}  // namespace

TEST(PolynomialCondition, PointMassPasses) {
    const auto rep = check_polynomial_condition(EnvironmentLaw::point_mass(2, 0), pm_config(10, 35));
    EXPECT_EQ(rep.estimate, 0.0);
    EXPECT_LT(rep.ci.upper, std::pow(10.0, -35));
    EXPECT_EQ(rep.verdict, Verdict::Pass);
    EXPECT_EQ(rep.parameter("Ltilde"), 10.0);
    EXPECT_FALSE(rep.log3_c0.has_value());
}

TEST(PolynomialCondition, UniformFails) {
    const auto rep = check_polynomial_condition(EnvironmentLaw::uniform(2), pm_config(10, 35));
    EXPECT_EQ(rep.verdict, Verdict::Fail);
    EXPECT_GT(rep.ci.lower, 0.5);
    EXPECT_LT(rep.estimate, 1.0);
    // Both the estimate and the interval are pinned by the deterministic solve.
    RealizedEnvironment env(EnvironmentLaw::uniform(2), 0);
    EXPECT_NEAR(rep.estimate, quenched_backward_exit(env, e1, 10, 10), 1e-10);
}

TEST(PolynomialCondition, StraddlingIntervalIsInconclusive) {
    const double threshold = std::pow(10.0, -35);
    EXPECT_EQ(decide({threshold / 2, threshold * 2}, threshold), Verdict::Inconclusive);
    auto cfg = pm_config(10, 35);
    cfg.n_env = 2;
    const auto rep = check_polynomial_condition(EnvironmentLaw::dirichlet({4, 1, 1, 1}), cfg);
    EXPECT_EQ(rep.verdict, decide(rep.ci, rep.threshold));
    ASSERT_TRUE(rep.log3_c0.has_value());
    EXPECT_GT(*rep.log3_c0, 1920.0);
}

TEST(PolynomialCondition, BudgetExhaustionIsInconclusive) {
    auto cfg = pm_config(10, 35);
    cfg.solve.max_sites = 20;
    const auto rep = check_polynomial_condition(EnvironmentLaw::uniform(2), cfg);
    EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
    EXPECT_FALSE(rep.notes.empty());
}

TEST(PolynomialCondition, ValidatesParameters) {
    auto cfg = pm_config(1, 35);
    EXPECT_THROW(check_polynomial_condition(EnvironmentLaw::uniform(2), cfg), std::invalid_argument);
    cfg = pm_config(10, 35);
    cfg.Ltilde = 2;
    EXPECT_THROW(check_polynomial_condition(EnvironmentLaw::uniform(2), cfg), std::invalid_argument);
}

TEST(PolynomialCondition, LtildeScanPicksAPassingBox) {
    auto cfg = pm_config(4, 1);
    cfg.Ltilde = 6;
    cfg.scan_ltilde = true;
    cfg.ltilde_cap = 16;
    const auto rep = check_polynomial_condition(EnvironmentLaw::homogeneous({0.85, 0.05, 0.05, 0.05}), cfg);
    EXPECT_EQ(rep.verdict, Verdict::Pass);
    EXPECT_FALSE(rep.notes.empty());
}

TEST(PolynomialCondition, MonteCarloAgreesWithExactPerEnvironment) {
    const auto law = EnvironmentLaw::dirichlet({2, 1, 1, 1});
    auto exact = pm_config(8, 1);
    exact.n_env = 20;
    exact.seed = 31;
    auto mc = exact;
    mc.mode = PmMode::MonteCarlo;
    mc.n_walk = 4000;
    const auto a = check_polynomial_condition(law, exact);
    const auto b = check_polynomial_condition(law, mc);
    ASSERT_EQ(a.replica_values.size(), 20u);
    ASSERT_EQ(b.replica_values.size(), 20u);
    int inside = 0;
    for (std::size_t r = 0; r < 20; ++r) {
        const double p = a.replica_values[r];
        const double se = std::max(std::sqrt(p * (1 - p) / 4000.0), 1.0 / 4000.0);
        inside += std::abs(b.replica_values[r] - p) <= 4 * se ? 1 : 0;
    }
    EXPECT_GE(inside, 19);
    EXPECT_EQ(b.timeouts, 0u);
}

TEST(Effective, PointMassVanishes) {
    EffectiveCriterionConfig cfg;
    cfg.l = e1;
    const auto v = effective_criterion_functional(EnvironmentLaw::point_mass(2, 0), cfg);
    EXPECT_TRUE(v.applicable);
    EXPECT_EQ(v.rho_moment, 0.0);
    EXPECT_EQ(v.functional, 0.0);
    EXPECT_TRUE(v.below_one);
}

TEST(Effective, HomogeneousSingleSolve) {
    const auto law = EnvironmentLaw::homogeneous({0.7, 0.1, 0.1, 0.1});
    EffectiveCriterionConfig cfg;
    cfg.l = e1;
    const auto v = effective_criterion_functional(law, cfg);
    ASSERT_TRUE(v.applicable);
    EXPECT_TRUE(v.eta_closed_form);
    EXPECT_NEAR(v.eta_alpha, 10.0, 1e-12);

    // Independent value: dense solve on B(R, L-2, L+2, L~).
    RealizedEnvironment env(law, 0);
    const auto box = Region::box(e1, 6, 10, 8);
    const auto dense = oracle::dense_exit_probabilities(box, env);
    const double p = dense.value(dense.front, Site{});
    const double rho = (1 - p) / p;
    const double c1 = 2 * std::sqrt(2.0);
    const double ups = std::max(1.0 / 24, 2 * c1 / (c1 - 1) * std::log(100.0));
    EXPECT_NEAR(v.upsilon, ups, 1e-12);
    EXPECT_NEAR(v.rho_moment, rho, 1e-9 * rho);
    EXPECT_NEAR(v.functional, std::pow(ups, 3) * 8 * std::pow(8.0, 4) * rho, 1e-8 * v.functional);
    EXPECT_EQ(v.n_env, 1u);
}

TEST(Effective, HomogeneousRhoAgreesWithWalks) {
    const auto law = EnvironmentLaw::homogeneous({0.7, 0.1, 0.1, 0.1});
    RealizedEnvironment env(law, 0);
    const auto box = Region::box(e1, 6, 10, 8);
    const double p = quenched_exit_probabilities(box, env).probability(Site{}, BoundaryClass::Front);
    SplitMix64 rng(8);
    const int n = 200000;
    int front = 0;
    for (int i = 0; i < n; ++i) front += run_until_exit(env, box, Site{}, rng, 1000000).boundary == BoundaryClass::Front;
    EXPECT_NEAR(front / double(n), p, 4 * std::sqrt(p * (1 - p) / n));
}

TEST(Effective, NotApplicableWhenEtaInfinite) {
    EffectiveCriterionConfig cfg;
    cfg.l = e1;
    cfg.alpha = 1.5;
    cfg.n_env = 4;
    const auto v = effective_criterion_functional(EnvironmentLaw::dirichlet({2, 1, 1, 1}), cfg);
    EXPECT_FALSE(v.applicable);
    EXPECT_FALSE(v.below_one);

    cfg.alpha = 1.0;
    cfg.eta_samples = 100000;
    const auto t = effective_criterion_functional(EnvironmentLaw::trap_mixture(), cfg);
    EXPECT_FALSE(t.applicable);
}

TEST(Effective, MonotoneInRhoMoment) {
    double prev = -1.0;
    for (double m = 0.0; m <= 1.0; m += 0.01) {
        const double f = effective_functional(2, upsilon(1.0, 7.0, 2 * std::sqrt(2.0)), 8, 8, m);
        EXPECT_GE(f, prev);
        prev = f;
    }
    EXPECT_EQ(effective_functional(3, 2.0, 5, 5, 1.0), std::pow(2.0, 6) * 25 * std::pow(5.0, 7));
    EXPECT_EQ(upsilon(48.0, 1.0, 2.0), 2.0);
}

TEST(Effective, Validation) {
    EffectiveCriterionConfig cfg;
    cfg.l = e1;
    cfg.a = 2.0;
    EXPECT_THROW(effective_criterion_functional(EnvironmentLaw::uniform(2), cfg), std::invalid_argument);
    cfg.a = 1.0;
    cfg.L = 2.0;
    EXPECT_THROW(effective_criterion_functional(EnvironmentLaw::uniform(2), cfg), std::invalid_argument);
}

TEST(Velocity, PointMass) {
    VelocityConfig cfg;
    cfg.l = e1;
    cfg.n_blocks = 200;
    cfg.horizon = 200;
    const auto v = estimate_velocity(EnvironmentLaw::point_mass(2, 0), cfg);
    EXPECT_EQ(v.block_velocity[0], 1.0);
    EXPECT_EQ(v.block_velocity[1], 0.0);
    EXPECT_EQ(v.direction[0], 1.0);
    EXPECT_EQ(v.lln_along, 1.0);
    EXPECT_TRUE(v.estimators_agree);
}

TEST(Velocity, HomogeneousDrift) {
    VelocityConfig cfg;
    cfg.l = e1;
    cfg.n_blocks = 10000;
    cfg.horizon = 2000;
    const auto v = estimate_velocity(EnvironmentLaw::homogeneous({0.7, 0.1, 0.1, 0.1}), cfg);
    EXPECT_NEAR(v.block_along, 0.6, 3 * v.block_along_se);
    EXPECT_NEAR(v.lln_along, 0.6, 3 * v.lln_along_se);
    EXPECT_TRUE(v.estimators_agree);
    EXPECT_TRUE(v.ci_excludes_zero);
    EXPECT_GE(v.blocks, 10000u);
}

TEST(RegenTail, PointMassIsDegenerate) {
    RegenTailConfig cfg;
    cfg.l = e1;
    cfg.n_samples = 1000;
    cfg.horizon = 100;
    EXPECT_THROW(regeneration_tail(EnvironmentLaw::point_mass(2, 0), cfg), std::invalid_argument);
}

TEST(RegenTail, BallisticDirichletHasReport) {
    RegenTailConfig cfg;
    cfg.l = e1;
    cfg.n_samples = 1000;
    cfg.horizon = 4000;
    cfg.tail.bootstrap = 50;
    cfg.lln_checkpoints = {100, 1000};
    cfg.lln_walks = 50;
    const auto rep = regeneration_tail(EnvironmentLaw::dirichlet({2, 1, 1, 1}), cfg);
    EXPECT_EQ(rep.samples.tau.size(), 1000u);
    EXPECT_GT(rep.tail.hill, 1.0);
    EXPECT_FALSE(rep.survival.empty());
    EXPECT_EQ(rep.lln.size(), 2u);
    for (std::size_t i = 1; i < rep.survival.size(); ++i) EXPECT_LE(rep.survival[i].second, rep.survival[i - 1].second);
}

TEST(Trap, EdgeExitMeanMatchesTwoStateSolve) {
    for (double w1 : {0.1, 0.5, 0.9}) {
        for (double w2 : {0.2, 0.5, 0.99}) {
            Eigen::Matrix2d A;
            A << 1.0, -w1, -w2, 1.0;
            const Eigen::Vector2d m = A.partialPivLu().solve(Eigen::Vector2d(1.0, 1.0));
            EXPECT_NEAR(edge_exit_mean(w1, w2), m(0), 1e-12);
        }
    }
    EXPECT_EQ(edge_exit_mean(0.5, 0.5), 2.0);
}

TEST(Trap, SmallRunStructure) {
    TrapDemoConfig cfg;
    cfg.n_quenched = 100000;
    cfg.n_env = 20000;
    cfg.running_checkpoints = {1000, 20000};
    cfg.n_walk = 4;
    cfg.m_levels = {5, 10};
    cfg.max_steps = 10000000;
    const auto rep = trap_demo(cfg);
    ASSERT_EQ(rep.survival.size(), 3u);
    for (const auto& s : rep.survival) {
        EXPECT_EQ(s.exact, std::pow(4.0, -s.k));
        EXPECT_NEAR(s.empirical, s.exact, 4 * s.std_error);
    }
    EXPECT_EQ(rep.quenched_mean_exact, 2.0);
    EXPECT_NEAR(rep.quenched_mean, 2.0, 4 * rep.quenched_mean_se);
    ASSERT_EQ(rep.running_means.size(), 2u);
    EXPECT_GE(rep.max_F, 1.0);
    ASSERT_EQ(rep.hitting.size(), 2u);
    for (const auto& h : rep.hitting) EXPECT_GE(h.mean_ratio, 1.0);
}

TEST(Slab, PointMassNeverExitsBackward) {
    SlabCurveConfig cfg;
    cfg.l = e1;
    cfg.n_env = 50;
    cfg.n_walk = 2;
    const auto rep = slab_exit_curve(EnvironmentLaw::point_mass(2, 0), cfg);
    for (const auto& p : rep.points) EXPECT_EQ(p.estimate, 0.0);
}

TEST(Slab, UniformIsSymmetric) {
    SlabCurveConfig cfg;
    cfg.l = e1;
    cfg.n_env = 2000;
    cfg.n_walk = 5;
    const auto rep = slab_exit_curve(EnvironmentLaw::uniform(2), cfg);
    for (const auto& p : rep.points) EXPECT_NEAR(p.estimate, 0.5, 3 * std::sqrt(0.25 / p.trials)) << "L=" << p.L;
}

TEST(Slab, HomogeneousMatchesGamblersRuin) {
    // Along e_1 the walk moves +1 w.p. 0.7 and -1 w.p. 0.1, i.e. ratio r = 1/7;
    // the closed slab exits at +-(L+1).
    SlabCurveConfig cfg;
    cfg.l = e1;
    cfg.n_env = 100000;
    cfg.n_walk = 10;
    const auto rep = slab_exit_curve(EnvironmentLaw::homogeneous({0.7, 0.1, 0.1, 0.1}), cfg);
    ASSERT_EQ(rep.points.size(), 3u);
    for (const auto& p : rep.points) {
        const int k = static_cast<int>(p.L) + 1;
        const double back = 1.0 - oracle::gamblers_ruin(0.7, 0.1, k, 2 * k);
        EXPECT_TRUE(p.ci.contains(back)) << "L=" << p.L << " exact " << back;
    }
    EXPECT_GT(rep.points[0].ci.lower, rep.points[1].ci.upper);
    EXPECT_GE(rep.points[1].estimate, rep.points[2].estimate);
}

TEST(Slab, GammaL) {
    EXPECT_THROW(gamma_L(2.0), std::invalid_argument);
    EXPECT_NEAR(gamma_L(100.0), std::log(2.0) / std::log(std::log(100.0)), 1e-15);
}

TEST(Atypical, PointMassNeverAtypical) {
    AtypicalExitConfig cfg;
    cfg.n_env = 5;
    const auto rep = atypical_quenched_exit(EnvironmentLaw::point_mass(2, 0), cfg);
    EXPECT_EQ(rep.frequency, 0.0);
    EXPECT_EQ(rep.hits, 0u);
    for (double p : rep.front_probabilities) EXPECT_EQ(p, 1.0);
}

TEST(Atypical, UnderflowGuard) {
    AtypicalExitConfig cfg;
    cfg.kappa = 1e6;
    cfg.n_env = 7;
    const auto rep = atypical_quenched_exit(EnvironmentLaw::uniform(2), cfg);
    EXPECT_TRUE(rep.threshold_underflow);
    EXPECT_EQ(rep.frequency, 0.0);
    EXPECT_EQ(rep.hits, 0u);
}

TEST(Atypical, TrapMatchesBruteForceSolves) {
    AtypicalExitConfig cfg;
    cfg.n_env = 8;
    cfg.seed = 12;
    const auto law = EnvironmentLaw::trap_mixture();
    const auto rep = atypical_quenched_exit(law, cfg);
    ASSERT_EQ(rep.front_probabilities.size(), 8u);
    const auto box = tilted_box(2, cfg.beta, cfg.L, cfg.rho, e1);
    std::size_t hits = 0, solved = 0;
    for (std::size_t r = 0; r < cfg.n_env; ++r) {
        RealizedEnvironment env(law, derive_seed(cfg.seed, r, 0));
        SolveOptions tight;
        tight.tol = 1e-14;
        tight.throw_on_failure = false;
        const auto brute = quenched_exit_probabilities(box, env, tight);
        const auto dense = oracle::dense_exit_probabilities(box, env);
        const double p_dense = dense.value(dense.front, Site{});
        if (brute.converged) {
            EXPECT_NEAR(brute.probability(Site{}, BoundaryClass::Front), p_dense, 1e-9);
        }
        const double p = rep.front_probabilities[r];
        if (std::isnan(p)) continue;
        ++solved;
        EXPECT_NEAR(p, p_dense, 1e-8);
        hits += p_dense <= rep.threshold ? 1 : 0;
    }
    EXPECT_EQ(rep.solved, solved);
    EXPECT_EQ(rep.hits, hits);
    EXPECT_DOUBLE_EQ(rep.frequency, solved ? double(hits) / double(solved) : 0.0);
}
