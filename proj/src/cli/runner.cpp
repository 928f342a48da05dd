#include "rwre/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "rwre/criteria.hpp"
#include "rwre/environment.hpp"
#include "rwre/rng.hpp"

namespace rwre::cli {

namespace {

using Job = std::function<void(ReportEnvelope&)>;

struct Common {
    int d = 2;
    std::uint64_t seed = 1;
    int workers = 1;
};

Common read_common(ExperimentConfig& c) {
    Common k;
    k.d = c.get_int("d", 2);
    c.require(k.d >= 2 && k.d <= kMaxDim, "d", "must lie in [2, " + std::to_string(kMaxDim) + "]");
    if (k.d < 2 || k.d > kMaxDim) k.d = 2;
    k.seed = c.get_u64("seed", 1);
    k.workers = c.get_int("workers", 1);
    c.require(k.workers >= 1, "workers", "must be >= 1");
    if (k.workers < 1) k.workers = 1;
    const auto format = c.get_string("format", "table");
    c.require(format == "table" || format == "records", "format", "must be 'table' or 'records'");
    c.get_string("out", "");
    return k;
}

SolveOptions read_solve(ExperimentConfig& c) {
    SolveOptions s;
    s.tol = c.get_double("tol", s.tol);
    s.max_sweeps = c.get_u64("max_sweeps", s.max_sweeps);
    s.max_sites = c.get_size("max_sites", s.max_sites);
    c.require(s.tol > 0.0, "tol", "must be > 0");
    c.require(s.max_sweeps >= 1, "max_sweeps", "must be >= 1");
    return s;
}

double read_level(ExperimentConfig& c) {
    const double level = c.get_double("level", 0.99);
    c.require(level > 0.0 && level < 1.0, "level", "must lie in (0, 1)");
    return level;
}

std::string verdict_text(Verdict v) { return to_string(v); }

void add_vector(ReportEnvelope& env, const std::string& key, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) env.add(key + "." + std::to_string(i + 1), v[i]);
}

void add_interval(ReportEnvelope& env, const std::string& key, const Interval& ci) {
    env.add(key + ".lower", ci.lower);
    env.add(key + ".upper", ci.upper);
}

void add_moment(ReportEnvelope& env, const std::string& key, const MomentEstimate& m) {
    env.add(key + ".mean", m.mean);
    env.add(key + ".std_error", m.std_error);
    env.add_count(key + ".n", m.n);
    env.add(key + ".max_summand_fraction", m.max_summand_fraction);
    env.add(key + ".tail_index", m.tail_index);
    env.add(key + ".divergence_suspected", m.divergence_suspected ? "true" : "false");
    if (m.divergence_suspected) env.warnings.push_back(key + ": divergence suspected");
}

Job prepare_check_pm(ExperimentConfig& c) {
    const auto k = read_common(c);
    PolynomialConditionConfig p;
    const auto law = c.get_law("law", k.d);
    p.l = c.get_direction("l", k.d);
    p.L = c.get_double("L", 10.0);
    p.Ltilde = c.get_double("Ltilde", p.L);
    p.M = c.get_double("M", 15.0 * k.d + 5.0);
    p.n_env = c.get_size("n_env", 100);
    const auto mode = c.get_string("mode", "exact");
    c.require(mode == "exact" || mode == "mc", "mode", "must be 'exact' or 'mc'");
    p.mode = mode == "mc" ? PmMode::MonteCarlo : PmMode::ExactSolve;
    p.n_walk = c.get_size("n_walk", 1);
    p.scan_ltilde = c.get_bool("scan", false);
    p.ltilde_cap = c.get_double("ltilde_cap", 64.0);
    p.max_steps = c.get_u64("max_steps", 10'000'000);
    p.solve = read_solve(c);
    p.level = read_level(c);
    p.seed = k.seed;
    p.workers = k.workers;
    c.require(p.L >= 2.0, "L", "must be >= 2");
    c.require(p.M >= 1.0, "M", "must be >= 1");
    c.require(p.Ltilde >= 3.0 * std::sqrt(static_cast<double>(k.d)) && p.Ltilde <= 70.0 * p.L * p.L * p.L, "Ltilde",
              "must lie in [3 sqrt(d), 70 L^3]");
    c.require(p.n_env >= 1, "n_env", "must be >= 1");
    c.require(p.n_walk >= 1, "n_walk", "must be >= 1");
    return [law, p](ReportEnvelope& env) {
        const auto rep = check_polynomial_condition(law, p);
        for (std::size_t r = 0; r < rep.replica_values.size(); ++r) {
            nlohmann::json rec{{"replica", r}, {"value", rep.replica_values[r]}};
            if (r < rep.replica_timeouts.size()) rec["timeouts"] = rep.replica_timeouts[r];
            env.records.push_back(rec);
        }
        env.add("condition", rep.condition);
        for (const auto& [key, v] : rep.parameters) env.add("parameter." + key, v);
        env.add("estimate", rep.estimate);
        add_interval(env, "ci", rep.ci);
        env.add("threshold", rep.threshold);
        env.add("verdict", verdict_text(rep.verdict));
        env.add_count("n_env", rep.n_env);
        env.add_count("n_walk", rep.n_walk);
        env.add_count("timeouts", rep.timeouts);
        env.add_count("nonconverged", rep.nonconverged);
        if (rep.log3_c0) env.add("log3_c0", *rep.log3_c0);
        for (std::size_t i = 0; i < rep.notes.size(); ++i) env.add("note." + std::to_string(i + 1), rep.notes[i]);
        if (rep.timeouts > 0) env.warnings.push_back(std::to_string(rep.timeouts) + " walks timed out");
        if (rep.nonconverged > 0) env.warnings.push_back(std::to_string(rep.nonconverged) + " solves did not converge");
        env.exit_code = exit_code_for(rep.verdict);
    };
}

Job prepare_effective(ExperimentConfig& c) {
    const auto k = read_common(c);
    EffectiveCriterionConfig p;
    const auto law = c.get_law("law", k.d);
    p.l = c.get_direction("l", k.d);
    p.L = c.get_double("L", 8.0);
    p.Ltilde = c.get_double("Ltilde", 8.0);
    p.a = c.get_double("a", 1.0);
    p.alpha = c.get_double("alpha", 1.0);
    p.n_env = c.get_size("n_env", 50);
    p.eta_samples = c.get_size("eta_samples", 100000);
    p.solve = read_solve(c);
    p.seed = k.seed;
    p.workers = k.workers;
    c.require(p.a > 0.0 && p.a <= p.alpha, "a", "must satisfy 0 < a <= alpha");
    c.require(p.L >= 3.0, "L", "must be >= 3");
    c.require(p.Ltilde >= 3.0 * std::sqrt(static_cast<double>(k.d)) && p.Ltilde < p.L * p.L * p.L, "Ltilde",
              "must lie in [3 sqrt(d), L^3)");
    c.require(p.n_env >= 1, "n_env", "must be >= 1");
    c.require(p.eta_samples >= 100, "eta_samples", "must be >= 100");
    return [law, p](ReportEnvelope& env) {
        const auto v = effective_criterion_functional(law, p);
        for (std::size_t r = 0; r < v.rho_samples.size(); ++r) {
            env.records.push_back({{"replica", r}, {"rho", v.rho_samples[r]}});
        }
        env.add("applicable", v.applicable ? "true" : "false");
        env.add("eta_alpha", v.eta_alpha);
        env.add("eta_closed_form", v.eta_closed_form ? "true" : "false");
        env.add("c1", v.c1);
        env.add("upsilon", v.upsilon);
        env.add("rho_moment", v.rho_moment);
        env.add("rho_moment.std_error", v.rho_moment_se);
        env.add("functional", v.functional);
        env.add("below_one", v.below_one ? "true" : "false");
        env.add_count("n_env", v.n_env);
        env.add_count("degenerate", v.degenerate);
        for (std::size_t i = 0; i < v.notes.size(); ++i) env.add("note." + std::to_string(i + 1), v.notes[i]);
        if (v.degenerate > 0) env.warnings.push_back(std::to_string(v.degenerate) + " environments with p_B below tol");
        env.exit_code = !v.applicable ? kExitInconclusive : v.below_one ? kExitPass : kExitFail;
    };
}

Job prepare_ellipticity(ExperimentConfig& c) {
    const auto k = read_common(c);
    const auto law = c.get_law("law", k.d);
    const auto alpha = c.get_doubles("alpha", std::vector<double>(static_cast<std::size_t>(2 * k.d), 1.0));
    const auto vhat = c.get_direction("vhat", k.d);
    const auto n = c.get_size("n", 100000);
    const auto grid = c.get_doubles("alpha_grid", {0.25, 0.5, 1.0});
    const bool es = c.get_bool("es", true);
    const double max_fraction = c.get_double("max_fraction", 0.5);
    c.require(static_cast<int>(alpha.size()) == 2 * k.d, "alpha", "needs 2d entries");
    bool positive = true;
    for (double a : alpha) positive = positive && a > 0.0;
    c.require(positive, "alpha", "entries must be > 0");
    for (double a : grid) c.require(a >= 0.0, "alpha_grid", "entries must be >= 0");
    c.require(n >= 100, "n", "must be >= 100");
    c.require(max_fraction > 0.0 && max_fraction < 1.0, "max_fraction", "must lie in (0, 1)");
    const std::uint64_t seed = k.seed;
    return [=](ReportEnvelope& env) {
        DivergenceConfig dc;
        dc.max_fraction = max_fraction;
        auto rep = check_E_prime(law, alpha, vhat, n, derive_seed(seed, 0, 0), dc);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            rep.eta_scan.push_back(estimate_eta(law, grid[i], n, derive_seed(seed, i + 1, 0), dc));
        }
        if (es) rep.es = estimate_ES(law, n, derive_seed(seed, 0, 1), dc);
        env.add("kappa", rep.kappa);
        add_moment(env, "joint_moment", rep.joint_moment);
        env.add("towards_direction", rep.towards_direction ? "true" : "false");
        if (rep.lambda) {
            env.add("lambda", *rep.lambda);
            env.add("lambda_above_one", *rep.lambda > 1.0 ? "true" : "false");
        }
        for (std::size_t i = 0; i < rep.eta_scan.size(); ++i) {
            const auto& e = rep.eta_scan[i];
            const std::string key = "eta[" + format_double(e.alpha) + "]";
            env.add(key, e.eta);
            env.add(key + ".direction", std::to_string(e.argmax + 1));
            env.add(key + ".std_error", e.per_direction[static_cast<std::size_t>(e.argmax)].std_error);
            env.add(key + ".divergence_suspected", e.divergence_suspected ? "true" : "false");
            if (const auto exact = eta_closed_form(law, e.alpha)) env.add(key + ".closed_form", *exact);
            if (e.divergence_suspected) env.warnings.push_back(key + ": divergence suspected");
            for (std::size_t j = 0; j < e.per_direction.size(); ++j) {
                const auto& m = e.per_direction[j];
                env.records.push_back({{"alpha", e.alpha},
                                       {"direction", j + 1},
                                       {"mean", m.mean},
                                       {"std_error", m.std_error},
                                       {"max_summand_fraction", m.max_summand_fraction},
                                       {"tail_index", m.tail_index},
                                       {"divergence_suspected", m.divergence_suspected}});
            }
        }
        if (rep.es) {
            for (std::size_t i = 0; i < rep.es->per_axis.size(); ++i) {
                const std::string key = "es.axis" + std::to_string(i + 1);
                add_moment(env, key, rep.es->per_axis[i]);
                if (rep.es->analytic_finite) {
                    env.add(key + ".analytic_finite", (*rep.es->analytic_finite)[i] ? "true" : "false");
                }
            }
        }
        env.exit_code = kExitPass;
    };
}

Job prepare_velocity(ExperimentConfig& c) {
    const auto k = read_common(c);
    VelocityConfig p;
    const auto law = c.get_law("law", k.d);
    p.l = c.get_direction("l", k.d);
    p.a = c.get_double("a", 2.0 * std::sqrt(static_cast<double>(k.d)) + 1.0);
    p.n_blocks = c.get_size("n_blocks", 10000);
    p.horizon = c.get_size("horizon", 20000);
    p.min_trajectories = c.get_size("min_trajectories", 30);
    p.max_trajectories = c.get_size("max_trajectories", 100000);
    p.batches = c.get_size("batches", 30);
    p.level = read_level(c);
    p.seed = k.seed;
    p.workers = k.workers;
    c.require(p.a > 2.0 * std::sqrt(static_cast<double>(k.d)), "a", "must be > 2 sqrt(d)");
    c.require(p.n_blocks >= 100, "n_blocks", "must be >= 100");
    c.require(p.horizon >= 1, "horizon", "must be >= 1");
    c.require(p.batches >= 2, "batches", "must be >= 2");
    c.require(p.max_trajectories >= p.min_trajectories, "max_trajectories", "must be >= min_trajectories");
    return [law, p](ReportEnvelope& env) {
        VelocityReport rep;
        try {
            rep = estimate_velocity(law, p);
        } catch (const BudgetExhausted& e) {
            env.add("status", "budget-exhausted");
            env.warnings.push_back(e.what());
            env.exit_code = kExitInconclusive;
            return;
        }
        env.add("status", "complete");
        add_vector(env, "v_block", rep.block_velocity);
        env.add("v_block.along", rep.block_along);
        env.add("v_block.along.std_error", rep.block_along_se);
        add_interval(env, "v_block.along.ci", rep.block_ci);
        env.add("v_block.ci_excludes_zero", rep.ci_excludes_zero ? "true" : "false");
        add_vector(env, "v_lln", rep.lln_velocity);
        env.add("v_lln.along", rep.lln_along);
        env.add("v_lln.along.std_error", rep.lln_along_se);
        add_vector(env, "vhat", rep.direction);
        env.add("estimators_agree", rep.estimators_agree ? "true" : "false");
        env.add_count("blocks", rep.blocks);
        env.add_count("trajectories", rep.trajectories);
        env.add_count("censored_blocks", rep.censored_blocks);
        env.add_count("trajectories_without_regeneration", rep.trajectories_without_regeneration);
        env.add("mean_first_duration", rep.mean_first_duration);
        if (rep.trajectories_without_regeneration > 0) {
            env.warnings.push_back(std::to_string(rep.trajectories_without_regeneration) +
                                   " trajectories without a confirmed regeneration");
        }
        if (rep.censored_blocks > 0) {
            env.warnings.push_back(std::to_string(rep.censored_blocks) + " censored final blocks discarded");
        }
        env.exit_code = kExitPass;
    };
}

Job prepare_regen_tail(ExperimentConfig& c) {
    const auto k = read_common(c);
    RegenTailConfig p;
    const auto law = c.get_law("law", k.d);
    p.l = c.get_direction("l", k.d);
    p.a = c.get_double("a", 2.0 * std::sqrt(static_cast<double>(k.d)) + 1.0);
    p.n_samples = c.get_size("n_samples", 2000);
    p.horizon = c.get_size("horizon", 100000);
    p.tail.k_fraction = c.get_double("hill_k", 0.05);
    p.tail.bootstrap = c.get_size("bootstrap", 200);
    p.tail.level = c.get_double("tail_level", 0.99);
    p.tail.exponent_cap = c.get_double("exponent_cap", 10.0);
    p.lln_checkpoints = c.get_sizes("lln_checkpoints", {});
    p.lln_walks = c.get_size("lln_walks", 0);
    p.seed = k.seed;
    p.tail.seed = derive_seed(k.seed, 0, 6);
    p.workers = k.workers;
    c.require(p.a > 2.0 * std::sqrt(static_cast<double>(k.d)), "a", "must be > 2 sqrt(d)");
    c.require(p.n_samples >= 1000, "n_samples", "must be >= 1000");
    c.require(p.horizon >= 2, "horizon", "must be >= 2");
    c.require(p.tail.k_fraction > 0.0 && p.tail.k_fraction < 1.0, "hill_k", "must lie in (0, 1)");
    c.require(p.tail.level > 0.0 && p.tail.level < 1.0, "tail_level", "must lie in (0, 1)");
    c.require(p.tail.exponent_cap > 0.0, "exponent_cap", "must be > 0");
    bool increasing = true;
    for (std::size_t i = 0; i < p.lln_checkpoints.size(); ++i) {
        increasing = increasing && p.lln_checkpoints[i] > (i ? p.lln_checkpoints[i - 1] : 0);
    }
    c.require(increasing, "lln_checkpoints", "must be positive and increasing");
    return [law, p](ReportEnvelope& env) {
        RegenTailReport rep;
        try {
            rep = regeneration_tail(law, p);
        } catch (const std::invalid_argument& e) {
            env.add("status", "degenerate-sample");
            env.warnings.push_back(e.what());
            env.exit_code = kExitInconclusive;
            return;
        }
        for (std::size_t r = 0; r < rep.samples.tau.size(); ++r) {
            env.records.push_back(
                {{"replica", r}, {"tau1", rep.samples.tau[r]}, {"censored", rep.samples.censored[r] != 0}});
        }
        env.add("status", "complete");
        env.add_count("samples", rep.tail.n);
        env.add_count("censored", rep.tail.censored);
        env.add_count("cutoff", rep.samples.cutoff);
        env.add_count("hill.k", rep.tail.k);
        env.add("hill", rep.tail.hill);
        add_interval(env, "hill.ci", rep.tail.hill_ci);
        env.add("hill.small_k", rep.tail.hill_small_k);
        env.add("loglog", rep.tail.loglog);
        add_interval(env, "loglog.ci", rep.tail.loglog_ci);
        env.add("heavy_tail_detected", rep.tail.heavy_tail_detected ? "true" : "false");
        env.add("capped", rep.tail.capped ? "true" : "false");
        if (rep.radius_stretch_exponent) env.add("radius.stretch_exponent", *rep.radius_stretch_exponent);
        for (const auto& pt : rep.lln) {
            env.add("lln[" + std::to_string(pt.n) + "]", pt.mean);
            env.add("lln[" + std::to_string(pt.n) + "].std_error", pt.std_error);
        }
        if (rep.tail.censored > 0) {
            env.warnings.push_back(std::to_string(rep.tail.censored) + " first regeneration times censored");
        }
        Table tail{{"u", "survival"}, {}};
        for (const auto& [u, s] : rep.survival) tail.rows.push_back({u, s});
        env.series["tail"] = tail;
        Table radius{{"L", "survival"}, {}};
        for (const auto& [u, s] : rep.radius_survival) radius.rows.push_back({u, s});
        env.series["radius"] = radius;
        if (!rep.lln.empty()) {
            Table lln{{"n", "mean", "std_error"}, {}};
            for (const auto& pt : rep.lln) lln.rows.push_back({static_cast<double>(pt.n), pt.mean, pt.std_error});
            env.series["lln"] = lln;
        }
        env.exit_code = kExitPass;
    };
}

Job prepare_slab(ExperimentConfig& c) {
    const auto k = read_common(c);
    SlabCurveConfig p;
    const auto law = c.get_law("law", k.d);
    p.l = c.get_direction("l", k.d);
    p.L_grid = c.get_doubles("L_grid", p.L_grid);
    p.n_env = c.get_size("n_env", 1000);
    p.n_walk = c.get_size("n_walk", 10);
    p.gammas = c.get_doubles("gammas", p.gammas);
    p.max_steps = c.get_u64("max_steps", p.max_steps);
    p.level = read_level(c);
    p.seed = k.seed;
    p.workers = k.workers;
    bool increasing = !p.L_grid.empty();
    for (std::size_t i = 0; i < p.L_grid.size(); ++i) {
        increasing = increasing && p.L_grid[i] > (i ? p.L_grid[i - 1] : 0.0);
    }
    c.require(increasing, "L_grid", "must be positive and increasing");
    c.require(p.n_env >= 1, "n_env", "must be >= 1");
    c.require(p.n_walk >= 1, "n_walk", "must be >= 1");
    for (double g : p.gammas) c.require(g > 0.0 && g < 1.0, "gammas", "entries must lie in (0, 1)");
    return [law, p](ReportEnvelope& env) {
        const auto rep = slab_exit_curve(law, p);
        Table t{{"L", "estimate", "lower", "upper"}, {}};
        std::size_t timeouts = 0;
        for (const auto& pt : rep.points) {
            env.records.push_back({{"L", pt.L},
                                   {"estimate", pt.estimate},
                                   {"lower", pt.ci.lower},
                                   {"upper", pt.ci.upper},
                                   {"trials", pt.trials},
                                   {"timeouts", pt.timeouts}});
            const std::string key = "P[" + format_double(pt.L) + "]";
            env.add(key, pt.estimate);
            add_interval(env, key + ".ci", pt.ci);
            env.add_count(key + ".trials", pt.trials);
            env.add_count(key + ".timeouts", pt.timeouts);
            timeouts += pt.timeouts;
            t.rows.push_back({pt.L, pt.estimate, pt.ci.lower, pt.ci.upper});
        }
        for (const auto& [g, s] : rep.gamma_slopes) env.add("slope[gamma=" + format_double(g) + "]", s);
        if (rep.gamma_L_slope) env.add("slope[gamma_L]", *rep.gamma_L_slope);
        env.add("note", "diagnostic only: the slab conditions are asymptotic in L");
        if (timeouts > 0) env.warnings.push_back(std::to_string(timeouts) + " walks timed out (excluded from trials)");
        env.series["slab"] = t;
        env.exit_code = kExitPass;
    };
}

Job prepare_atypical(ExperimentConfig& c) {
    const auto k = read_common(c);
    AtypicalExitConfig p;
    const auto law = c.get_law("law", k.d);
    p.beta = c.get_double("beta", 0.75);
    p.rho = c.get_double("rho", 1.0);
    p.L = c.get_double("L", 12.0);
    p.kappa = c.get_double("kappa", 1.0);
    p.asymptotic = c.get_direction("vhat", k.d);
    p.n_env = c.get_size("n_env", 100);
    p.solve = read_solve(c);
    p.level = read_level(c);
    p.seed = k.seed;
    p.workers = k.workers;
    c.require(p.beta > 0.5 && p.beta < 1.0, "beta", "must lie in (1/2, 1)");
    c.require(p.rho > 0.0, "rho", "must be > 0");
    c.require(p.L > 1.0, "L", "must be > 1");
    c.require(p.kappa > 0.0, "kappa", "must be > 0");
    c.require(p.n_env >= 1, "n_env", "must be >= 1");
    c.require((*p.asymptotic)[0] > 0.0, "vhat", "must satisfy vhat . e1 > 0");
    return [law, p](ReportEnvelope& env) {
        const auto rep = atypical_quenched_exit(law, p);
        for (std::size_t r = 0; r < rep.front_probabilities.size(); ++r) {
            env.records.push_back({{"replica", r}, {"front_probability", rep.front_probabilities[r]}});
        }
        env.add("threshold", rep.threshold);
        env.add("threshold_underflow", rep.threshold_underflow ? "true" : "false");
        env.add_count("hits", rep.hits);
        env.add_count("solved", rep.solved);
        env.add_count("nonconverged", rep.nonconverged);
        env.add("frequency", rep.frequency);
        add_interval(env, "frequency.ci", rep.ci);
        if (rep.nonconverged > 0) env.warnings.push_back(std::to_string(rep.nonconverged) + " solves did not converge");
        env.exit_code = kExitPass;
    };
}

Job prepare_trap(ExperimentConfig& c) {
    const auto k = read_common(c);
    c.require(k.d == 2, "d", "trap-demo runs in d = 2");
    TrapDemoConfig p;
    p.omega1 = c.get_double("omega1", p.omega1);
    p.omega2 = c.get_double("omega2", p.omega2);
    p.n_quenched = c.get_size("n_quenched", p.n_quenched);
    const auto ks = c.get_sizes("k_levels", {1, 2, 3});
    p.phi.scale = c.get_double("phi_scale", p.phi.scale);
    p.phi.exponent = c.get_double("phi_exponent", p.phi.exponent);
    p.n_env = c.get_size("n_env", p.n_env);
    p.running_checkpoints = c.get_sizes("checkpoints", p.running_checkpoints);
    p.n_walk = c.get_size("n_walk", p.n_walk);
    const auto ms = c.get_sizes("m_levels", {20, 50, 100, 200});
    p.max_steps = c.get_u64("max_steps", p.max_steps);
    const int axis = c.get_int("axis", 2);
    p.seed = k.seed;
    p.workers = k.workers;
    p.k_levels.assign(ks.begin(), ks.end());
    p.m_levels.assign(ms.begin(), ms.end());
    p.axis = axis - 1;
    c.require(axis == 1 || axis == 2, "axis", "must be 1 or 2");
    c.require(p.omega1 >= 0.0 && p.omega1 <= 1.0, "omega1", "must lie in [0, 1]");
    c.require(p.omega2 >= 0.0 && p.omega2 <= 1.0, "omega2", "must lie in [0, 1]");
    c.require(p.omega1 * p.omega2 < 1.0, "omega2", "omega1 omega2 must be < 1");
    c.require(p.phi.scale > 0.0 && p.phi.scale <= 0.25, "phi_scale", "must lie in (0, 1/4]");
    c.require(p.phi.exponent > 0.0, "phi_exponent", "must be > 0");
    bool increasing = true;
    for (std::size_t i = 0; i < p.running_checkpoints.size(); ++i) {
        increasing = increasing && p.running_checkpoints[i] > (i ? p.running_checkpoints[i - 1] : 0);
    }
    c.require(increasing, "checkpoints", "must be positive and increasing");
    c.require(p.running_checkpoints.empty() || p.running_checkpoints.back() <= p.n_env, "checkpoints",
              "must not exceed n_env");
    bool m_ok = true;
    for (std::size_t i = 0; i < ms.size(); ++i) m_ok = m_ok && ms[i] > (i ? ms[i - 1] : 0);
    c.require(m_ok, "m_levels", "must be positive and increasing");
    c.require(p.max_steps >= 1, "max_steps", "must be >= 1");
    return [p](ReportEnvelope& env) {
        const auto rep = trap_demo(p);
        for (const auto& s : rep.survival) {
            const std::string key = "quenched.P[F>" + std::to_string(2 * s.k) + "]";
            env.add(key, s.empirical);
            env.add(key + ".std_error", s.std_error);
            env.add(key + ".exact", s.exact);
            env.records.push_back({{"part", "quenched"}, {"k", s.k}, {"empirical", s.empirical}, {"exact", s.exact}});
        }
        env.add("quenched.mean", rep.quenched_mean);
        env.add("quenched.mean.std_error", rep.quenched_mean_se);
        env.add("quenched.mean.exact", rep.quenched_mean_exact);
        Table running{{"n", "mean_F"}, {}};
        for (const auto& [n, m] : rep.running_means) {
            env.add("annealed.mean_F[" + std::to_string(n) + "]", m);
            env.records.push_back({{"part", "annealed"}, {"n", n}, {"mean_F", m}});
            running.rows.push_back({static_cast<double>(n), m});
        }
        env.add("annealed.max_F", rep.max_F);
        Table hitting{{"m", "T_m_over_m", "std_error"}, {}};
        for (const auto& h : rep.hitting) {
            env.add("T_m/m[" + std::to_string(h.m) + "]", h.mean_ratio);
            env.add("T_m/m[" + std::to_string(h.m) + "].std_error", h.std_error);
            env.records.push_back({{"part", "hitting"}, {"m", h.m}, {"mean_ratio", h.mean_ratio}});
            hitting.rows.push_back({static_cast<double>(h.m), h.mean_ratio, h.std_error});
        }
        env.add_count("timeouts", rep.timeouts);
        if (rep.timeouts > 0) env.warnings.push_back(std::to_string(rep.timeouts) + " walks hit max_steps");
        env.series["running"] = running;
        env.series["trap"] = hitting;
        env.exit_code = kExitPass;
    };
}

using Prepare = Job (*)(ExperimentConfig&);

const std::vector<std::pair<std::string, Prepare>>& table() {
    static const std::vector<std::pair<std::string, Prepare>> t{
        {"check-pm", prepare_check_pm},          {"effective-criterion", prepare_effective},
        {"check-ellipticity", prepare_ellipticity}, {"velocity", prepare_velocity},
        {"regen-tail", prepare_regen_tail},      {"slab-curve", prepare_slab},
        {"atypical-exit", prepare_atypical},     {"trap-demo", prepare_trap},
    };
    return t;
}

Prepare find(const std::string& sub) {
    for (const auto& [name, fn] : table()) {
        if (name == sub) return fn;
    }
    throw UsageError({"unknown subcommand '" + sub + "'"});
}

}  // namespace

int exit_code_for(Verdict v) {
    switch (v) {
        case Verdict::Pass: return kExitPass;
        case Verdict::Fail: return kExitFail;
        default: return kExitInconclusive;
    }
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : table()) n.push_back(name);
        return n;
    }();
    return names;
}

std::map<std::string, std::string> defaults_for(const std::string& subcommand) {
    ExperimentConfig cfg;
    find(subcommand)(cfg);
    return cfg.effective();
}

ReportEnvelope run(const std::string& subcommand, ExperimentConfig cfg) {
    const Prepare prepare = find(subcommand);
    const Job job = prepare(cfg);
    cfg.reject_unused();
    cfg.throw_if_invalid();
    ReportEnvelope env;
    env.subcommand = subcommand;
    env.config = cfg.effective();
    const auto t0 = std::chrono::steady_clock::now();
    job(env);
    env.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return env;
}

}  // namespace rwre::cli
