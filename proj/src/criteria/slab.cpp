#include <algorithm>
#include <cmath>
#include <limits>

#include "rwre/criteria.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"

namespace rwre {

double gamma_L(double L) {
    if (!(L >= 3.0)) throw std::invalid_argument("gamma_L: need L >= 3");
    return std::log(2.0) / std::log(std::log(L));
}

SlabCurveReport slab_exit_curve(const EnvironmentLaw& law, const SlabCurveConfig& cfg) {
    if (cfg.l.dim() != law.dim()) throw std::invalid_argument("slab_exit_curve: direction/law dimension mismatch");
    if (cfg.L_grid.empty()) throw std::invalid_argument("slab_exit_curve: empty L grid");
    for (std::size_t i = 0; i < cfg.L_grid.size(); ++i) {
        if (!(cfg.L_grid[i] > 0.0) || (i > 0 && !(cfg.L_grid[i] > cfg.L_grid[i - 1]))) {
            throw std::invalid_argument("slab_exit_curve: L grid must be positive and increasing");
        }
    }
    if (cfg.n_env < 1 || cfg.n_walk < 1) throw std::invalid_argument("slab_exit_curve: n_env and n_walk must be >= 1");

    SlabCurveReport rep;
    for (std::size_t j = 0; j < cfg.L_grid.size(); ++j) {
        const double L = cfg.L_grid[j];
        const Region slab(Slab{cfg.l, L});
        struct One {
            std::size_t back = 0;
            std::size_t timeouts = 0;
        };
        const auto rows = map_replicas<One>(cfg.n_env, cfg.workers, [&](std::size_t r) {
            RealizedEnvironment env(law, derive_seed(cfg.seed, r, 0));
            SplitMix64 rng(derive_seed(cfg.seed, r, 16 + j));
            One o;
            for (std::size_t w = 0; w < cfg.n_walk; ++w) {
                const auto ex = run_until_exit(env, slab, Site{}, rng, cfg.max_steps);
                if (ex.timed_out) {
                    ++o.timeouts;
                } else if (cfg.l.dot(ex.exit_site) < 0.0) {
                    ++o.back;
                }
            }
            return o;
        });
        std::size_t back = 0, timeouts = 0;
        for (const auto& o : rows) {
            back += o.back;
            timeouts += o.timeouts;
        }
        const std::size_t trials = cfg.n_env * cfg.n_walk - timeouts;
        SlabCurveReport::Point p{L, std::numeric_limits<double>::quiet_NaN(), {0.0, 1.0}, trials, timeouts};
        if (trials > 0) {
            p.estimate = static_cast<double>(back) / static_cast<double>(trials);
            p.ci = clopper_pearson(static_cast<double>(back), static_cast<double>(trials), cfg.level);
        }
        rep.points.push_back(p);
    }

    auto fit = [&](auto&& exponent) -> std::optional<double> {
        std::vector<double> x, y;
        for (const auto& p : rep.points) {
            if (!(p.estimate > 0.0)) continue;
            const auto g = exponent(p.L);
            if (!g) continue;
            x.push_back(std::pow(p.L, *g));
            y.push_back(std::log(p.estimate));
        }
        if (x.size() < 2) return std::nullopt;
        return least_squares(x, y).slope;
    };
    for (double g : cfg.gammas) {
        if (const auto s = fit([g](double) { return std::optional<double>(g); })) rep.gamma_slopes.emplace_back(g, *s);
    }
    rep.gamma_L_slope = fit([](double L) { return L >= 3.0 ? std::optional<double>(gamma_L(L)) : std::nullopt; });
    return rep;
}

}  // namespace rwre
