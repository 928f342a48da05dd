// Acceptance checks: one PASS/FAIL line per criterion, with measured values.
// Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rwre/cli/config.hpp"
#include "rwre/cli/report.hpp"
#include "rwre/cli/runner.hpp"
#include "rwre/criteria.hpp"
#include "rwre/parallel.hpp"

using namespace rwre;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Detail {
public:
    template <class T>
    Detail& operator()(const std::string& key, const T& value) {
        out_ << (out_.tellp() > 0 ? ", " : "") << key << "=" << value;
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

const Direction e1 = Direction::axis(2, 0);

Outcome gamblers_ruin() {
    RealizedEnvironment env(EnvironmentLaw::homogeneous({0.6, 0.0, 0.4, 0.0}), 1);
    const Region band(RotatedBox{Rotation::identity(2), 2, 2, 3});
    const auto res = quenched_exit_probabilities(band, env);
    const double p = res.probability(Site{}, BoundaryClass::Front);
    const double expected = oracle::gamblers_ruin(0.6, 0.4, 2, 4);
    Detail d;
    d("front", p)("expected", expected)("abs_err", std::abs(p - 9.0 / 13.0));
    return {std::abs(p - 9.0 / 13.0) <= 1e-9 && std::abs(expected - 9.0 / 13.0) <= 1e-15, d.str()};
}

Outcome beta_moment() {
    const std::vector<double> beta{2, 2, 2, 2};
    const double exact = dirichlet_inverse_moment(beta, 0, 1.0);
    const auto est = estimate_eta(EnvironmentLaw::dirichlet(beta), 1.0, 1000000, 2);
    const double se = est.per_direction[static_cast<std::size_t>(est.argmax)].std_error;
    Detail d;
    d("closed_form", exact)("mc", est.eta)("se", se)("z", (est.eta - 7.0) / se);
    return {std::abs(exact - 7.0) <= 1e-9 && std::abs(est.eta - 7.0) <= 3 * se && !est.divergence_suspected, d.str()};
}

Outcome formula_arithmetic() {
    const double k = kappa(2, std::vector<double>{1, 1, 1, 1});
    const double l1 = lambda_dirichlet(2, std::vector<double>{2, 1, 1, 1});
    const double l2 = lambda_dirichlet(2, std::vector<double>{0.2, 0.1, 0.1, 0.1});
    Detail d;
    d("kappa", k)("lambda(2,1,1,1)", l1)("lambda(0.2,0.1,0.1,0.1)", cli::format_double(l2));
    // 0.7 is not representable; "exact" is the correctly rounded result of the formula.
    const double l2_ref = 2.0 * (0.2 + 0.1 + 0.1 + 0.1) - (0.2 + 0.1);
    return {k == 6.0 && l1 == 7.0 && l2 == l2_ref && std::abs(l2 - 0.7) <= 1e-15, d.str()};
}

Outcome trap_identities() {
    TrapDemoConfig cfg;
    cfg.n_env = 0;
    cfg.n_walk = 0;
    cfg.running_checkpoints.clear();
    cfg.n_quenched = 1000000;
    cfg.seed = 4;
    cfg.workers = hardware_workers();
    const auto rep = trap_demo(cfg);
    bool ok = true;
    Detail d;
    for (const auto& s : rep.survival) {
        const double exact = std::pow(4.0, -s.k);
        ok = ok && s.exact == exact && std::abs(s.empirical - exact) <= 3 * s.std_error;
        d("P(F>" + std::to_string(2 * s.k) + ")", s.empirical)("z" + std::to_string(s.k), (s.empirical - exact) / s.std_error);
    }
    ok = ok && std::abs(rep.quenched_mean - 2.0) <= 3 * rep.quenched_mean_se;
    d("mean_F", rep.quenched_mean)("se", rep.quenched_mean_se);
    return {ok, d.str()};
}

Outcome trap_divergence() {
    int running_wins = 0, hitting_wins = 0;
    std::size_t timeouts = 0;
    std::ostringstream per_seed;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        TrapDemoConfig cfg;
        cfg.n_quenched = 0;
        cfg.n_env = 1000000;
        cfg.running_checkpoints = {10000, 1000000};
        cfg.n_walk = 100;
        cfg.m_levels = {20, 200};
        cfg.seed = seed;
        cfg.workers = hardware_workers();
        const auto rep = trap_demo(cfg);
        const bool r = rep.running_means[1].second > rep.running_means[0].second;
        const bool h = rep.hitting[1].mean_ratio > rep.hitting[0].mean_ratio;
        running_wins += r;
        hitting_wins += h;
        timeouts += rep.timeouts;
        per_seed << (seed > 1 ? " " : "") << seed << ":" << rep.running_means[0].second << "->"
                 << rep.running_means[1].second << "/" << rep.hitting[0].mean_ratio << "->" << rep.hitting[1].mean_ratio;
    }
    Detail d;
    d("running_mean_increases", std::to_string(running_wins) + "/10")("T_m/m_increases",
                                                                         std::to_string(hitting_wins) + "/10")(
        "timeouts", timeouts)("per_seed", per_seed.str());
    return {running_wins >= 9 && hitting_wins >= 9, d.str()};
}

Outcome ballistic_regime() {
    VelocityConfig cfg;
    cfg.l = e1;
    cfg.n_blocks = 10000;
    cfg.horizon = 20000;
    cfg.seed = 6;
    cfg.workers = hardware_workers();
    const auto v = estimate_velocity(EnvironmentLaw::dirichlet({2, 1, 1, 1}), cfg);
    const double joint = std::hypot(v.block_along_se, v.lln_along_se);
    Detail d;
    d("block_v", v.block_along)("ci", "[" + std::to_string(v.block_ci.lower) + "," + std::to_string(v.block_ci.upper) + "]")(
        "lln_v", v.lln_along)("diff/joint_se", std::abs(v.block_along - v.lln_along) / joint)("blocks", v.blocks);
    return {v.blocks >= 10000 && v.block_ci.lower > 0.0 && std::abs(v.block_along - v.lln_along) <= 3 * joint, d.str()};
}

Outcome non_ballistic_regime() {
    RegenTailConfig cfg;
    cfg.l = e1;
    cfg.n_samples = 2000;
    cfg.horizon = 100000;
    cfg.seed = 7;
    cfg.workers = hardware_workers();
    cfg.lln_checkpoints = {10000, 1000000};
    cfg.lln_walks = 200;
    const auto rep = regeneration_tail(EnvironmentLaw::dirichlet({0.2, 0.1, 0.1, 0.1}), cfg);
    const double v4 = rep.lln[0].mean, v6 = rep.lln[1].mean;
    Detail d;
    d("hill", rep.tail.hill)("hill_ci_upper", rep.tail.hill_ci.upper)("censored", rep.tail.censored)("v(1e4)", v4)(
        "v(1e6)", v6)("ratio", v6 / v4);
    return {rep.tail.hill_ci.upper < 1.2 && v6 < 0.5 * v4, d.str()};
}

Outcome pm_verdicts() {
    PolynomialConditionConfig cfg;
    cfg.l = e1;
    cfg.L = 10;
    cfg.Ltilde = 10;
    cfg.M = 35;
    cfg.mode = PmMode::ExactSolve;
    const auto pm = check_polynomial_condition(EnvironmentLaw::point_mass(2, 0), cfg);
    const auto un = check_polynomial_condition(EnvironmentLaw::uniform(2), cfg);
    const double t = std::pow(10.0, -35);
    const auto injected = decide({0.5 * t, 2.0 * t}, t);
    Detail d;
    d("pointmass", to_string(pm.verdict))("pointmass_estimate", pm.estimate)("uniform", to_string(un.verdict))(
        "uniform_estimate", un.estimate)("injected", to_string(injected));
    return {pm.verdict == Verdict::Pass && pm.estimate == 0.0 && un.verdict == Verdict::Fail &&
                injected == Verdict::Inconclusive,
            d.str()};
}

Outcome solver_vs_mc() {
    const auto law = EnvironmentLaw::dirichlet({2, 1, 1, 1});
    const Region box(RotatedBox{Rotation::identity(2), 6, 6, 6});
    std::size_t interior = 0;
    box.for_each_interior([&](const Site&) { ++interior; });
    const std::size_t walks = 100000;
    struct Row {
        double exact, mc, se;
    };
    const auto rows = map_replicas<Row>(20, hardware_workers(), [&](std::size_t r) {
        RealizedEnvironment env(law, derive_seed(9, r, 0));
        const double p = quenched_exit_probabilities(box, env).probability(Site{}, BoundaryClass::Front);
        SplitMix64 rng(derive_seed(9, r, 1));
        std::size_t front = 0;
        for (std::size_t w = 0; w < walks; ++w) {
            front += run_until_exit(env, box, Site{}, rng, 100000000).boundary == BoundaryClass::Front;
        }
        const double q = static_cast<double>(front) / walks;
        return Row{p, q, std::sqrt(p * (1 - p) / walks)};
    });
    int inside = 0;
    double worst = 0.0;
    for (const auto& row : rows) {
        const double z = std::abs(row.mc - row.exact) / row.se;
        worst = std::max(worst, z);
        inside += z <= 4.0;
    }
    Detail d;
    d("box_sites", interior)("inside_4se", std::to_string(inside) + "/20")("max_z", worst);
    return {interior == 121 && inside >= 19, d.str()};
}

Outcome determinism() {
    const std::vector<std::pair<std::string, std::string>> jobs{
        {"check-pm", "law = dirichlet(2,1,1,1)\nL = 8\nn_env = 40\nmode = mc\nn_walk = 50\n"},
        {"effective-criterion", "law = dirichlet(2,1,1,1)\nalpha = 0.5\na = 0.5\nL = 6\nLtilde = 6\nn_env = 20\n"},
        {"check-ellipticity", "law = dirichlet(2,1,1,1)\nalpha = 0.1,0.1,0.1,0.1\nn = 20000\n"},
        {"velocity", "law = dirichlet(2,1,1,1)\nn_blocks = 10000\n"},
        {"regen-tail", "law = dirichlet(2,1,1,1)\nn_samples = 1000\nhorizon = 5000\nbootstrap = 50\n"},
        {"slab-curve", "law = dirichlet(2,1,1,1)\nL_grid = 2,4,8\nn_env = 200\nn_walk = 5\n"},
        {"atypical-exit", "law = trap\nn_env = 8\n"},
        {"trap-demo", "n_quenched = 20000\nn_env = 20000\ncheckpoints = 2000,20000\nn_walk = 8\nm_levels = 5,10\n"},
    };
    int identical = 0;
    std::string mismatched;
    for (const auto& [sub, text] : jobs) {
        std::vector<std::string> outputs;
        for (const char* workers : {"1", "8", "1", "8"}) {
            auto cfg = cli::ExperimentConfig::parse(text);
            cfg.set("seed", "2024");
            cfg.set("workers", workers);
            std::ostringstream out;
            cli::write_summary(cli::run(sub, cfg), out);
            outputs.push_back(out.str());
        }
        bool same = true;
        for (const auto& o : outputs) same = same && o == outputs.front();
        identical += same;
        if (!same) mismatched += " " + sub;
    }
    Detail d;
    d("identical", std::to_string(identical) + "/" + std::to_string(jobs.size()));
    if (!mismatched.empty()) d("mismatched", mismatched);
    return {identical == static_cast<int>(jobs.size()), d.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "gambler's-ruin oracle", 1, gamblers_ruin},
        {2, "beta-moment oracle", 30, beta_moment},
        {3, "formula arithmetic", 1, formula_arithmetic},
        {4, "trap identities", 60, trap_identities},
        {5, "trap divergence", 600, trap_divergence},
        {6, "ballistic regime", 900, ballistic_regime},
        {7, "non-ballistic regime", 1200, non_ballistic_regime},
        {8, "(P)_M verdict logic", 60, pm_verdicts},
        {9, "solver vs Monte Carlo", 600, solver_vs_mc},
        {10, "determinism", 1e9, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("criterion %2d %-24s %s  (%.2fs%s) %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                    in_time ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
