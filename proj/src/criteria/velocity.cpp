#include <cmath>

#include "rwre/criteria.hpp"

namespace rwre {

VelocityReport estimate_velocity(const EnvironmentLaw& law, const VelocityConfig& cfg) {
    const int d = law.dim();
    if (cfg.l.dim() != d) throw std::invalid_argument("estimate_velocity: direction/law dimension mismatch");
    if (cfg.n_blocks < 100) throw std::invalid_argument("estimate_velocity: n_blocks must be >= 100");
    const auto params = cfg.a > 0.0 ? RegenerationParams(cfg.l, cfg.a) : RegenerationParams::with_default_a(cfg.l);
    const auto blocks = simulate_regeneration_blocks(law, params, cfg.n_blocks, cfg.horizon, cfg.seed, cfg.workers,
                                                     cfg.max_trajectories, cfg.min_trajectories);

    VelocityReport rep;
    rep.blocks = blocks.durations.size();
    rep.trajectories = blocks.trajectories;
    rep.censored_blocks = blocks.censored_blocks;
    rep.trajectories_without_regeneration = blocks.trajectories_without_regeneration;
    RunningStats first;
    for (double t : blocks.first_durations) first.add(t);
    rep.mean_first_duration = first.mean();

    std::vector<double> along(rep.blocks);
    for (std::size_t k = 0; k < rep.blocks; ++k) along[k] = cfg.l.dot(blocks.displacements[k]);
    const auto ratio = batch_means_ratio(along, blocks.durations, cfg.batches);
    rep.block_along = ratio.value;
    rep.block_along_se = ratio.std_error;
    const double z = normal_quantile(1.0 - (1.0 - cfg.level) / 2.0);
    rep.block_ci = {ratio.value - z * ratio.std_error, ratio.value + z * ratio.std_error};
    rep.ci_excludes_zero = rep.block_ci.lower > 0.0 || rep.block_ci.upper < 0.0;
    for (int i = 0; i < d; ++i) {
        std::vector<double> comp(rep.blocks);
        for (std::size_t k = 0; k < rep.blocks; ++k) comp[k] = blocks.displacements[k][static_cast<std::size_t>(i)];
        rep.block_velocity.push_back(batch_means_ratio(comp, blocks.durations, cfg.batches).value);
    }

    const double H = static_cast<double>(cfg.horizon);
    std::vector<RunningStats> per_axis(static_cast<std::size_t>(d));
    RunningStats lln;
    std::vector<double> dir(static_cast<std::size_t>(d), 0.0);
    for (const auto& x : blocks.final_positions) {
        double norm = 0.0;
        for (int i = 0; i < d; ++i) {
            const double c = x[static_cast<std::size_t>(i)];
            per_axis[static_cast<std::size_t>(i)].add(c / H);
            norm += c * c;
        }
        lln.add(cfg.l.dot(x) / H);
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (int i = 0; i < d; ++i) dir[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)] / norm;
        }
    }
    for (const auto& s : per_axis) rep.lln_velocity.push_back(s.mean());
    rep.lln_along = lln.mean();
    rep.lln_along_se = lln.count() > 1 ? lln.stderr_of_mean() : 0.0;
    double dn = 0.0;
    for (double c : dir) dn += c * c;
    dn = std::sqrt(dn);
    for (double& c : dir) c = dn > 0.0 ? c / dn : 0.0;
    rep.direction = dir;

    const double band = 3.0 * std::hypot(rep.block_along_se, rep.lln_along_se);
    rep.estimators_agree = std::abs(rep.block_along - rep.lln_along) <= band;
    return rep;
}

}  // namespace rwre
