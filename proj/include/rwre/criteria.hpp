#pragma once

// Finite-size evaluations of the ballisticity conditions and estimators:
// the polynomial condition on a box, the effective-criterion functional,
// regeneration-based velocity, tail exponents of regeneration times, the edge
// trap demonstration, backward slab-exit curves, and atypical quenched exits
// from tilted boxes.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"
#include "rwre/solver.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct CriterionReport {
    std::string condition;
    std::vector<std::pair<std::string, double>> parameters;
    double estimate = 0.0;
    Interval ci;
    double threshold = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::size_t n_env = 0;
    std::size_t n_walk = 0;
    std::uint64_t seed = 0;
    std::optional<double> log3_c0;
    std::size_t timeouts = 0;
    std::size_t nonconverged = 0;
    std::vector<std::string> notes;
    /// Per-environment value (exact mode: the quenched probability, NaN when
    /// the solve failed; monte-carlo mode: the event fraction).
    std::vector<double> replica_values;
    std::vector<std::size_t> replica_timeouts;

    double parameter(const std::string& key) const;
};

enum class PmMode { MonteCarlo, ExactSolve };

struct PolynomialConditionConfig {
    Direction l;
    double L = 10.0;
    double Ltilde = 10.0;
    double M = 35.0;
    std::size_t n_env = 100;
    PmMode mode = PmMode::ExactSolve;
    std::size_t n_walk = 1;             ///< walks per environment (monte-carlo mode)
    std::uint64_t seed = 1;
    int workers = 1;
    bool scan_ltilde = false;           ///< also try L^2 and min(70 L^3, cap)
    double ltilde_cap = 64.0;
    std::uint64_t max_steps = 10'000'000;
    double level = 0.99;
    SolveOptions solve;
};

/// Estimates P_0(X_{T_B} . l < L) on B_{l,L,L~} and compares its exact 0.99
/// interval against L^-M.
CriterionReport check_polynomial_condition(const EnvironmentLaw& law, const PolynomialConditionConfig& cfg);

/// Per-environment exact value of P_{0,omega}(X_{T_B} . l < L) on B_{l,L,L~}.
double quenched_backward_exit(RealizedEnvironment& env, const Direction& l, double L, double Ltilde,
                              const SolveOptions& opts = {});

struct EffectiveCriterionConfig {
    Direction l;
    double L = 8.0;
    double Ltilde = 8.0;
    double a = 1.0;
    double alpha = 1.0;
    std::size_t n_env = 50;
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t eta_samples = 100000;  ///< Monte Carlo eta_alpha when no closed form exists
    SolveOptions solve;
};

struct EffectiveCriterionValue {
    bool applicable = true;
    double L = 0.0, Ltilde = 0.0, a = 0.0, alpha = 0.0;
    double eta_alpha = 0.0;
    bool eta_closed_form = false;
    double c1 = 0.0;
    double upsilon = 0.0;
    double rho_moment = 0.0;  ///< E[rho_B^a]
    double rho_moment_se = 0.0;
    double functional = 0.0;
    bool below_one = false;
    std::size_t n_env = 0;
    std::size_t degenerate = 0;  ///< environments with p_B below tolerance
    std::vector<double> rho_samples;
    std::vector<std::string> notes;
};

/// Upsilon = max{alpha/24, (2 c1/(c1-1)) log(eta_alpha^2)}.
double upsilon(double alpha, double eta_alpha, double c1);
/// Upsilon^{3(d-1)} L~^{d-1} L^{3(d-1)+1} E[rho^a].
double effective_functional(int dim, double ups, double L, double Ltilde, double rho_moment);

/// eta_alpha from a closed form where one exists (Dirichlet, homogeneous,
/// point mass); nullopt otherwise.
std::optional<double> eta_closed_form(const EnvironmentLaw& law, double alpha);

EffectiveCriterionValue effective_criterion_functional(const EnvironmentLaw& law, const EffectiveCriterionConfig& cfg);

struct VelocityConfig {
    Direction l;
    double a = 0.0;  ///< 0 selects 2 sqrt(d) + 1
    std::size_t n_blocks = 10000;
    std::size_t horizon = 20000;
    std::size_t min_trajectories = 30;
    std::size_t max_trajectories = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    double level = 0.99;
    std::size_t batches = 30;
};

struct VelocityReport {
    std::vector<double> block_velocity;  ///< E[X_{tau2}-X_{tau1}] / E[tau2-tau1], per axis
    double block_along = 0.0;            ///< . l
    double block_along_se = 0.0;
    Interval block_ci;
    std::vector<double> lln_velocity;    ///< mean of X_H / H
    double lln_along = 0.0;
    double lln_along_se = 0.0;
    std::vector<double> direction;       ///< normalized mean of X_H / |X_H|_2
    bool estimators_agree = false;       ///< within joint 3-SE band
    bool ci_excludes_zero = false;
    std::size_t blocks = 0;
    std::size_t trajectories = 0;
    std::size_t censored_blocks = 0;
    std::size_t trajectories_without_regeneration = 0;
    double mean_first_duration = 0.0;
};

VelocityReport estimate_velocity(const EnvironmentLaw& law, const VelocityConfig& cfg);

struct RegenTailConfig {
    Direction l;
    double a = 0.0;
    std::size_t n_samples = 2000;
    std::size_t horizon = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    TailConfig tail;
    std::vector<std::size_t> lln_checkpoints;  ///< optional X_n.l/n profile
    std::size_t lln_walks = 0;
};

struct RegenTailReport {
    FirstRegenerationSamples samples;
    TailEstimate tail;
    std::vector<std::pair<double, double>> survival;  ///< (u, P(tau_1 > u))
    std::vector<std::pair<double, double>> radius_survival;
    std::optional<double> radius_stretch_exponent;     ///< gamma in P(X* > L) ~ exp(-c L^gamma)
    std::vector<LlnPoint> lln;
};

RegenTailReport regeneration_tail(const EnvironmentLaw& law, const RegenTailConfig& cfg);

struct TrapDemoConfig {
    double omega1 = 0.5;  ///< omega(0, e_i) in the quenched check
    double omega2 = 0.5;  ///< omega(e_i, -e_i)
    std::size_t n_quenched = 1'000'000;
    std::vector<int> k_levels{1, 2, 3};
    PhiSpec phi;
    std::size_t n_env = 1'000'000;  ///< annealed F samples
    std::vector<std::size_t> running_checkpoints{10'000, 100'000, 1'000'000};
    std::size_t n_walk = 100;
    std::vector<int> m_levels{20, 50, 100, 200};
    std::uint64_t max_steps = 200'000'000;
    int axis = 1;  ///< trap edge {0, e_{axis+1}}
    std::uint64_t seed = 1;
    int workers = 1;
};

struct TrapReport {
    struct Survival {
        int k;
        double empirical;
        double std_error;
        double exact;
    };
    std::vector<Survival> survival;
    double quenched_mean = 0.0;
    double quenched_mean_se = 0.0;
    double quenched_mean_exact = 0.0;
    std::vector<std::pair<std::size_t, double>> running_means;  ///< (samples, mean of F)
    double max_F = 0.0;
    struct Level {
        int m;
        double mean_ratio;  ///< mean over walks of T_m / m
        double std_error;
    };
    std::vector<Level> hitting;
    std::size_t timeouts = 0;
};

/// Exact quenched mean exit time of the edge: (1 + omega1) / (1 - omega1 omega2).
double edge_exit_mean(double omega1, double omega2);

TrapReport trap_demo(const TrapDemoConfig& cfg);

struct SlabCurveConfig {
    Direction l;
    std::vector<double> L_grid{4, 8, 16};
    std::size_t n_env = 1000;
    std::size_t n_walk = 10;
    std::vector<double> gammas{0.5};
    std::uint64_t seed = 1;
    int workers = 1;
    std::uint64_t max_steps = 10'000'000;
    double level = 0.99;
};

struct SlabCurveReport {
    struct Point {
        double L;
        double estimate;
        Interval ci;
        std::size_t trials;
        std::size_t timeouts;
    };
    std::vector<Point> points;
    std::vector<std::pair<double, double>> gamma_slopes;  ///< (gamma, slope of log P vs L^gamma)
    std::optional<double> gamma_L_slope;                  ///< against L^{gamma_L}
};

/// gamma_L = log 2 / log log L, L >= 3.
double gamma_L(double L);

SlabCurveReport slab_exit_curve(const EnvironmentLaw& law, const SlabCurveConfig& cfg);

struct AtypicalExitConfig {
    double beta = 0.75;
    double rho = 1.0;
    double L = 12.0;
    double kappa = 1.0;
    std::optional<Direction> asymptotic;  ///< defaults to e_1
    std::size_t n_env = 100;
    std::uint64_t seed = 1;
    int workers = 1;
    SolveOptions solve;
    double level = 0.99;
};

struct AtypicalExitReport {
    double threshold = 0.0;  ///< exp(-kappa L^beta)
    bool threshold_underflow = false;
    std::size_t hits = 0;
    std::size_t solved = 0;
    std::size_t nonconverged = 0;
    double frequency = 0.0;
    Interval ci;
    std::vector<double> front_probabilities;  ///< per replica, NaN when not converged
};

/// Tilted box B_{beta,L}(0) used by atypical_quenched_exit.
Region tilted_box(int dim, double beta, double L, double rho, const Direction& asymptotic);

AtypicalExitReport atypical_quenched_exit(const EnvironmentLaw& law, const AtypicalExitConfig& cfg);

}  // namespace rwre
