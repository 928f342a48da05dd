#include <cmath>
#include <limits>

#include "rwre/criteria.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"

namespace rwre {

Region tilted_box(int dim, double beta, double L, double rho, const Direction& asymptotic) {
    if (asymptotic.dim() != dim) throw std::invalid_argument("tilted_box: direction dimension mismatch");
    return Region(TiltedBox{beta, L, rho, Site{}, asymptotic});
}

AtypicalExitReport atypical_quenched_exit(const EnvironmentLaw& law, const AtypicalExitConfig& cfg) {
    const int d = law.dim();
    if (!(cfg.beta > 0.5 && cfg.beta < 1.0)) throw std::invalid_argument("atypical_quenched_exit: beta must lie in (1/2, 1)");
    if (!(cfg.L > 1.0)) throw std::invalid_argument("atypical_quenched_exit: L must be > 1");
    if (!(cfg.rho > 0.0)) throw std::invalid_argument("atypical_quenched_exit: rho must be > 0");
    if (!(cfg.kappa > 0.0)) throw std::invalid_argument("atypical_quenched_exit: kappa must be > 0");
    if (cfg.n_env < 1) throw std::invalid_argument("atypical_quenched_exit: n_env must be >= 1");
    const Direction v = cfg.asymptotic ? *cfg.asymptotic : Direction::axis(d, 0);
    const Region box = tilted_box(d, cfg.beta, cfg.L, cfg.rho, v);

    AtypicalExitReport rep;
    rep.threshold = std::exp(-cfg.kappa * std::pow(cfg.L, cfg.beta));
    if (rep.threshold < std::numeric_limits<double>::min()) {
        // no solve can certify a probability this small: the event is empty by convention
        rep.threshold_underflow = true;
        rep.solved = cfg.n_env;
        rep.ci = clopper_pearson(0.0, static_cast<double>(cfg.n_env), cfg.level);
        rep.front_probabilities.assign(cfg.n_env, std::numeric_limits<double>::quiet_NaN());
        return rep;
    }

    SolveOptions opts = cfg.solve;
    opts.throw_on_failure = false;
    const std::size_t n = law.deterministic() ? 1 : cfg.n_env;
    auto probs = map_replicas<double>(n, cfg.workers, [&](std::size_t r) {
        RealizedEnvironment env(law, derive_seed(cfg.seed, r, 0));
        const auto sol = quenched_exit_probabilities(box, env, opts);
        if (!sol.converged) return std::numeric_limits<double>::quiet_NaN();
        return sol.probability(Site{}, BoundaryClass::Front);
    });
    if (n < cfg.n_env) probs.assign(cfg.n_env, probs[0]);
    rep.front_probabilities = probs;
    for (double p : probs) {
        if (std::isnan(p)) {
            ++rep.nonconverged;
            continue;
        }
        ++rep.solved;
        if (p <= rep.threshold) ++rep.hits;
    }
    if (rep.solved > 0) {
        rep.frequency = static_cast<double>(rep.hits) / static_cast<double>(rep.solved);
        rep.ci = clopper_pearson(static_cast<double>(rep.hits), static_cast<double>(rep.solved), cfg.level);
    } else {
        rep.ci = {0.0, 1.0};
    }
    return rep;
}

}  // namespace rwre
