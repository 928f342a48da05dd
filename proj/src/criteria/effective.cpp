#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/criteria.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"

namespace rwre {

double upsilon(double alpha, double eta_alpha, double c1) {
    return std::max(alpha / 24.0, (2.0 * c1 / (c1 - 1.0)) * std::log(eta_alpha * eta_alpha));
}

double effective_functional(int dim, double ups, double L, double Ltilde, double rho_moment) {
    if (rho_moment == 0.0) return 0.0;
    const double k = dim - 1;
    return std::pow(ups, 3.0 * k) * std::pow(Ltilde, k) * std::pow(L, 3.0 * k + 1.0) * rho_moment;
}

std::optional<double> eta_closed_form(const EnvironmentLaw& law, double alpha) {
    const int steps = 2 * law.dim();
    if (const auto* dir = std::get_if<DirichletLaw>(&law.variant())) {
        double eta = 0.0;
        for (int e = 0; e < steps; ++e) eta = std::max(eta, dirichlet_inverse_moment(dir->beta, e, alpha));
        return eta;
    }
    if (law.deterministic()) {
        const auto w = sample_site(law, 0, Site{});
        double eta = 0.0;
        for (int e = 0; e < steps; ++e) {
            const double p = w[static_cast<std::size_t>(e)];
            eta = std::max(eta, p > 0.0 ? std::pow(p, -alpha) : std::numeric_limits<double>::infinity());
        }
        return eta;
    }
    return std::nullopt;
}

EffectiveCriterionValue effective_criterion_functional(const EnvironmentLaw& law, const EffectiveCriterionConfig& cfg) {
    const int d = law.dim();
    if (cfg.l.dim() != d) throw std::invalid_argument("effective_criterion_functional: direction/law dimension mismatch");
    if (!(cfg.a > 0.0 && cfg.a <= cfg.alpha)) throw std::invalid_argument("effective_criterion_functional: need 0 < a <= alpha");
    if (!(cfg.L >= 3.0)) throw std::invalid_argument("effective_criterion_functional: L must be >= 3");
    if (!(cfg.Ltilde >= 3.0 * std::sqrt(static_cast<double>(d)) && cfg.Ltilde < cfg.L * cfg.L * cfg.L)) {
        throw std::invalid_argument("effective_criterion_functional: Ltilde must lie in [3 sqrt(d), L^3)");
    }
    if (cfg.n_env < 1) throw std::invalid_argument("effective_criterion_functional: n_env must be >= 1");

    EffectiveCriterionValue v;
    v.L = cfg.L;
    v.Ltilde = cfg.Ltilde;
    v.a = cfg.a;
    v.alpha = cfg.alpha;
    v.c1 = PathConstants::for_dimension(d).c1;

    if (const auto closed = eta_closed_form(law, cfg.alpha)) {
        v.eta_alpha = *closed;
        v.eta_closed_form = true;
    } else {
        const auto est = estimate_eta(law, cfg.alpha, cfg.eta_samples, derive_seed(cfg.seed, 0, 2));
        v.eta_alpha = est.divergence_suspected ? std::numeric_limits<double>::infinity() : est.eta;
        if (est.divergence_suspected) v.notes.push_back("eta_alpha divergence flag raised");
    }

    const Region box = Region::box(cfg.l, cfg.L - 2.0, cfg.L + 2.0, cfg.Ltilde);
    const std::size_t n = law.deterministic() ? 1 : cfg.n_env;
    v.rho_samples = map_replicas<double>(n, cfg.workers, [&](std::size_t r) {
        RealizedEnvironment env(law, derive_seed(cfg.seed, r, 0));
        return rho_B(env, box, Site{}, cfg.solve).rho;
    });
    v.n_env = n;
    RunningStats rs;
    for (double rho : v.rho_samples) {
        if (std::isinf(rho)) {
            ++v.degenerate;
            continue;
        }
        rs.add(std::pow(rho, cfg.a));
    }
    if (v.degenerate > 0) {
        v.rho_moment = std::numeric_limits<double>::infinity();
        v.rho_moment_se = std::numeric_limits<double>::infinity();
        v.notes.push_back("front exit probability below tolerance in some environments");
    } else {
        v.rho_moment = rs.mean();
        v.rho_moment_se = n > 1 ? rs.stderr_of_mean() : 0.0;
    }

    if (std::isinf(v.eta_alpha)) {
        v.upsilon = std::numeric_limits<double>::infinity();
        if (v.rho_moment == 0.0) {
            v.functional = 0.0;
            v.notes.push_back("eta_alpha infinite but E[rho^a] = 0, so the functional vanishes");
        } else {
            v.applicable = false;
            v.functional = std::numeric_limits<double>::quiet_NaN();
            v.notes.push_back("not applicable: eta_alpha is infinite");
        }
    } else {
        v.upsilon = upsilon(cfg.alpha, v.eta_alpha, v.c1);
        v.functional = effective_functional(d, v.upsilon, cfg.L, cfg.Ltilde, v.rho_moment);
    }
    v.below_one = v.applicable && v.functional < 1.0;
    v.notes.push_back("constant-free: the dimension constants multiplying the functional are not specified");
    return v;
}

}  // namespace rwre
