#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rwre/criteria.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"

namespace rwre {

double CriterionReport::parameter(const std::string& key) const {
    for (const auto& [k, v] : parameters) {
        if (k == key) return v;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double quenched_backward_exit(RealizedEnvironment& env, const Direction& l, double L, double Ltilde,
                              const SolveOptions& opts) {
    const Region box = Region::box_symmetric(l, L, Ltilde);
    // slot 0: X_T . l >= L, slot 1: the event X_T . l < L
    const auto sol = quenched_exit_probabilities(box, env, opts, [&l, L](const Site& y) {
        return l.dot(y) >= L ? 0 : 1;
    });
    return sol.slot_probability(Site{}, 1);
}

namespace {

struct PmOutcome {
    double Ltilde = 0.0;
    double estimate = 0.0;
    Interval ci;
    std::size_t timeouts = 0;
    std::size_t nonconverged = 0;
    bool budget_exhausted = false;
    std::string budget_message;
    std::vector<double> values;
    std::vector<std::size_t> timeouts_per_env;
};

PmOutcome exact_mode(const EnvironmentLaw& law, const PolynomialConditionConfig& cfg, double Ltilde) {
    PmOutcome out;
    out.Ltilde = Ltilde;
    SolveOptions opts = cfg.solve;
    opts.throw_on_failure = true;
    if (law.deterministic()) {
        RealizedEnvironment env(law, derive_seed(cfg.seed, 0, 0));
        const Region box = Region::box_symmetric(cfg.l, cfg.L, Ltilde);
        const auto sol = quenched_exit_probabilities(box, env, opts, [&cfg](const Site& y) {
            return cfg.l.dot(y) >= cfg.L ? 0 : 1;
        });
        const double q = sol.slot_probability(Site{}, 1);
        // every environment is the same: the interval is the remaining solve error
        out.estimate = q;
        const double err = std::max(sol.error_estimate, sol.residual);
        out.ci = {q, std::min(1.0, q + 2.0 * err)};  // iterates increase monotonically from 0
        out.values = {q};
        return out;
    }
    struct One {
        double q = 0.0;
        bool ok = true;
    };
    const auto rows = map_replicas<One>(cfg.n_env, cfg.workers, [&](std::size_t r) {
        RealizedEnvironment env(law, derive_seed(cfg.seed, r, 0));
        try {
            return One{quenched_backward_exit(env, cfg.l, cfg.L, Ltilde, opts), true};
        } catch (const SolverNotConverged&) {
            return One{0.0, false};
        }
    });
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& o : rows) {
        out.values.push_back(o.ok ? o.q : std::numeric_limits<double>::quiet_NaN());
        if (!o.ok) {
            ++out.nonconverged;
            continue;
        }
        sum += o.q;
        ++n;
    }
    if (n == 0) {
        out.ci = {0.0, 1.0};
        return out;
    }
    out.estimate = sum / static_cast<double>(n);
    out.ci = clopper_pearson(sum, static_cast<double>(n), cfg.level);
    return out;
}

PmOutcome monte_carlo_mode(const EnvironmentLaw& law, const PolynomialConditionConfig& cfg, double Ltilde) {
    PmOutcome out;
    out.Ltilde = Ltilde;
    const Region box = Region::box_symmetric(cfg.l, cfg.L, Ltilde);
    struct One {
        std::size_t events = 0;
        std::size_t timeouts = 0;
    };
    const auto rows = map_replicas<One>(cfg.n_env, cfg.workers, [&](std::size_t r) {
        RealizedEnvironment env(law, derive_seed(cfg.seed, r, 0));
        SplitMix64 rng(derive_seed(cfg.seed, r, 1));
        One o;
        for (std::size_t w = 0; w < cfg.n_walk; ++w) {
            const auto ex = run_until_exit(env, box, Site{}, rng, cfg.max_steps);
            if (ex.timed_out) {
                ++o.timeouts;
                ++o.events;  // a walk still inside has not exited through the front
            } else if (cfg.l.dot(ex.exit_site) < cfg.L) {
                ++o.events;
            }
        }
        return o;
    });
    std::size_t events = 0;
    for (const auto& o : rows) {
        events += o.events;
        out.timeouts += o.timeouts;
        out.values.push_back(static_cast<double>(o.events) / static_cast<double>(cfg.n_walk));
        out.timeouts_per_env.push_back(o.timeouts);
    }
    const double trials = static_cast<double>(cfg.n_env * cfg.n_walk);
    out.estimate = static_cast<double>(events) / trials;
    out.ci = clopper_pearson(static_cast<double>(events), trials, cfg.level);
    return out;
}

std::optional<double> alpha_bar(const EnvironmentLaw& law) {
    if (const auto* dir = std::get_if<DirichletLaw>(&law.variant())) {
        return *std::min_element(dir->beta.begin(), dir->beta.end());
    }
    if (const auto* trap = std::get_if<TrapMixtureLaw>(&law.variant())) {
        return 1.0 / trap->phi.exponent;
    }
    return std::nullopt;
}

}  // namespace

CriterionReport check_polynomial_condition(const EnvironmentLaw& law, const PolynomialConditionConfig& cfg) {
    const int d = law.dim();
    const double min_lt = 3.0 * std::sqrt(static_cast<double>(d));
    const double max_lt = 70.0 * cfg.L * cfg.L * cfg.L;
    if (cfg.l.dim() != d) throw std::invalid_argument("check_polynomial_condition: direction/law dimension mismatch");
    if (!(cfg.L >= 2.0)) throw std::invalid_argument("check_polynomial_condition: L must be >= 2");
    if (!(cfg.M >= 1.0)) throw std::invalid_argument("check_polynomial_condition: M must be >= 1");
    if (!(cfg.Ltilde >= min_lt && cfg.Ltilde <= max_lt)) {
        throw std::invalid_argument("check_polynomial_condition: Ltilde must lie in [3 sqrt(d), 70 L^3]");
    }
    if (cfg.n_env < 1) throw std::invalid_argument("check_polynomial_condition: n_env must be >= 1");
    if (cfg.mode == PmMode::MonteCarlo && cfg.n_walk < 1) {
        throw std::invalid_argument("check_polynomial_condition: n_walk must be >= 1");
    }

    std::vector<double> grid{cfg.Ltilde};
    if (cfg.scan_ltilde) {
        for (double v : {cfg.L, cfg.L * cfg.L, std::min(max_lt, cfg.ltilde_cap)}) {
            if (v >= min_lt && v <= max_lt) grid.push_back(v);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }

    CriterionReport rep;
    rep.condition = "polynomial";
    rep.threshold = std::pow(cfg.L, -cfg.M);
    rep.n_env = law.deterministic() && cfg.mode == PmMode::ExactSolve ? 1 : cfg.n_env;
    rep.n_walk = cfg.mode == PmMode::MonteCarlo ? cfg.n_walk : 0;
    rep.seed = cfg.seed;

    std::optional<PmOutcome> best;
    std::ostringstream scanned;
    for (double lt : grid) {
        PmOutcome o;
        try {
            o = cfg.mode == PmMode::ExactSolve ? exact_mode(law, cfg, lt) : monte_carlo_mode(law, cfg, lt);
        } catch (const BudgetExhausted& e) {
            o.Ltilde = lt;
            o.budget_exhausted = true;
            o.budget_message = e.what();
            o.ci = {0.0, 1.0};
            o.estimate = std::numeric_limits<double>::quiet_NaN();
        } catch (const SolverNotConverged& e) {
            o.Ltilde = lt;
            o.nonconverged = 1;
            o.budget_message = e.what();
            o.ci = {0.0, 1.0};
            o.estimate = std::numeric_limits<double>::quiet_NaN();
        }
        scanned << (scanned.tellp() > 0 ? "," : "") << lt << ":" << to_string(decide(o.ci, rep.threshold));
        if (o.budget_exhausted || !o.budget_message.empty()) rep.notes.push_back(o.budget_message);
        const bool better = !best || (decide(o.ci, rep.threshold) == Verdict::Pass &&
                                      decide(best->ci, rep.threshold) != Verdict::Pass) ||
                            (decide(best->ci, rep.threshold) != Verdict::Pass && o.ci.upper < best->ci.upper);
        if (better) best = o;
    }

    rep.estimate = best->estimate;
    rep.ci = best->ci;
    rep.timeouts = best->timeouts;
    rep.nonconverged = best->nonconverged;
    rep.replica_values = best->values;
    rep.replica_timeouts = best->timeouts_per_env;
    rep.verdict = decide(rep.ci, rep.threshold);
    if (best->budget_exhausted) rep.verdict = Verdict::Inconclusive;
    rep.parameters = {{"d", static_cast<double>(d)},
                      {"L", cfg.L},
                      {"Ltilde", best->Ltilde},
                      {"M", cfg.M},
                      {"level", cfg.level}};
    for (int i = 0; i < d; ++i) rep.parameters.emplace_back("l" + std::to_string(i + 1), cfg.l[i]);
    if (grid.size() > 1) rep.notes.push_back("Ltilde scan " + scanned.str());
    if (cfg.mode == PmMode::MonteCarlo && cfg.n_walk > 1) {
        rep.notes.push_back("walks within one environment are pooled as independent trials");
    }
    if (rep.timeouts > 0) rep.notes.push_back("timed-out walks counted as non-front exits");
    if (rep.nonconverged > 0) rep.notes.push_back("environments without a converged solve are excluded");

    if (const auto ab = alpha_bar(law)) {
        double eta = 0.0;
        if (const auto* dir = std::get_if<DirichletLaw>(&law.variant())) {
            for (int e = 0; e < 2 * d; ++e) eta = std::max(eta, dirichlet_inverse_moment(dir->beta, e, *ab / 2.0));
        } else {
            eta = estimate_eta(law, *ab / 2.0, 100000, derive_seed(cfg.seed, 0, 2)).eta;
        }
        rep.log3_c0 = log3_c0(d, eta);
        rep.notes.push_back("the theoretical scale requires L >= c0; checks at this L are heuristic");
    } else {
        rep.notes.push_back("log3 c0 undefined: eta_alpha is finite for every alpha or for none");
    }
    return rep;
}

}  // namespace rwre
