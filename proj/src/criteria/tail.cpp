#include <algorithm>
#include <cmath>

#include "rwre/criteria.hpp"
#include "rwre/rng.hpp"

namespace rwre {

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g;
    if (!(hi > lo)) return {lo};
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g.push_back(lo * std::exp(step * i));
    return g;
}

}  // namespace

RegenTailReport regeneration_tail(const EnvironmentLaw& law, const RegenTailConfig& cfg) {
    if (cfg.l.dim() != law.dim()) throw std::invalid_argument("regeneration_tail: direction/law dimension mismatch");
    const auto params = cfg.a > 0.0 ? RegenerationParams(cfg.l, cfg.a) : RegenerationParams::with_default_a(cfg.l);
    RegenTailReport rep;
    rep.samples = first_regeneration_samples(law, params, cfg.n_samples, cfg.horizon, cfg.seed, cfg.workers);
    rep.tail = estimate_tail_exponent(rep.samples.tau, rep.samples.censored, cfg.tail);

    const auto grid = log_grid(1.0, static_cast<double>(rep.samples.cutoff), 40);
    const auto surv = empirical_survival(rep.samples.tau, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) rep.survival.emplace_back(grid[i], surv[i]);

    if (!rep.samples.radius.empty()) {
        const double rmax = *std::max_element(rep.samples.radius.begin(), rep.samples.radius.end());
        std::vector<double> rg;
        for (double L = 1.0; L <= rmax; L += 1.0) rg.push_back(L);
        const auto rs = empirical_survival(rep.samples.radius, rg);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < rg.size(); ++i) {
            rep.radius_survival.emplace_back(rg[i], rs[i]);
            if (rs[i] > 0.0 && rs[i] < 1.0) {
                x.push_back(std::log(rg[i]));
                y.push_back(std::log(-std::log(rs[i])));
            }
        }
        if (x.size() >= 3) rep.radius_stretch_exponent = least_squares(x, y).slope;
    }

    if (cfg.lln_walks > 0 && !cfg.lln_checkpoints.empty()) {
        rep.lln = lln_profile(law, cfg.l, cfg.lln_checkpoints, cfg.lln_walks, derive_seed(cfg.seed, 0, 5), cfg.workers);
    }
    return rep;
}

}  // namespace rwre
