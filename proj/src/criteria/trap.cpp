#include <algorithm>
#include <cmath>

#include "rwre/criteria.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"

namespace rwre {

double edge_exit_mean(double omega1, double omega2) { return (1.0 + omega1) / (1.0 - omega1 * omega2); }

namespace {

constexpr int kDim = 2;
constexpr std::size_t kChunk = 4096;

/// Steps of the walk started at 0 until it leaves the edge {0, e}; `w0` and `w1`
/// are the transition vectors at 0 and e. Returns max_steps on timeout.
std::uint64_t edge_exit_time(const double* w0, const double* w1, int axis, SplitMix64& rng,
                             std::uint64_t max_steps) {
    bool at_origin = true;
    for (std::uint64_t n = 0; n < max_steps; ++n) {
        const int e = sample_step(at_origin ? w0 : w1, 2 * kDim, rng.uniform());
        const bool back_across = at_origin ? e == axis : e == axis + kDim;
        if (!back_across) return n + 1;
        at_origin = !at_origin;
    }
    return max_steps;
}

ProbVector edge_vector(int axis_step, double w) {
    ProbVector p{};
    for (int e = 0; e < 2 * kDim; ++e) p[static_cast<std::size_t>(e)] = (1.0 - w) / (2 * kDim - 1);
    p[static_cast<std::size_t>(axis_step)] = w;
    return p;
}

}  // namespace

TrapReport trap_demo(const TrapDemoConfig& cfg) {
    if (cfg.axis < 0 || cfg.axis >= kDim) throw std::invalid_argument("trap_demo: axis must be 0 or 1");
    if (!(cfg.omega1 >= 0.0 && cfg.omega1 <= 1.0 && cfg.omega2 >= 0.0 && cfg.omega2 <= 1.0) ||
        cfg.omega1 * cfg.omega2 >= 1.0) {
        throw std::invalid_argument("trap_demo: need omega1, omega2 in [0,1] with omega1 omega2 < 1");
    }
    if (!std::is_sorted(cfg.running_checkpoints.begin(), cfg.running_checkpoints.end()) ||
        (!cfg.running_checkpoints.empty() && cfg.running_checkpoints.back() > cfg.n_env)) {
        throw std::invalid_argument("trap_demo: running checkpoints must be increasing and at most n_env");
    }
    if (!std::is_sorted(cfg.m_levels.begin(), cfg.m_levels.end()) ||
        (!cfg.m_levels.empty() && cfg.m_levels.front() < 1)) {
        throw std::invalid_argument("trap_demo: m_levels must be positive and increasing");
    }
    const auto law = EnvironmentLaw::trap_mixture(cfg.phi);
    TrapReport rep;

    // (i) fixed edge: P(F > 2k) = (omega1 omega2)^k
    if (cfg.n_quenched > 0) {
        const auto w0 = edge_vector(cfg.axis, cfg.omega1);
        const auto w1 = edge_vector(cfg.axis + kDim, cfg.omega2);
        const std::size_t chunks = (cfg.n_quenched + kChunk - 1) / kChunk;
        const auto times = map_replicas<std::vector<double>>(chunks, cfg.workers, [&](std::size_t c) {
            SplitMix64 rng(derive_seed(cfg.seed, c, 3));
            const std::size_t n = std::min(kChunk, cfg.n_quenched - c * kChunk);
            std::vector<double> out(n);
            for (auto& f : out) f = static_cast<double>(edge_exit_time(w0.data(), w1.data(), cfg.axis, rng, cfg.max_steps));
            return out;
        });
        RunningStats mean;
        std::vector<std::size_t> exceed(cfg.k_levels.size(), 0);
        for (const auto& chunk : times) {
            for (double f : chunk) {
                mean.add(f);
                for (std::size_t j = 0; j < cfg.k_levels.size(); ++j) {
                    if (f > 2.0 * cfg.k_levels[j]) ++exceed[j];
                }
            }
        }
        const double n = static_cast<double>(cfg.n_quenched);
        for (std::size_t j = 0; j < cfg.k_levels.size(); ++j) {
            const double p = static_cast<double>(exceed[j]) / n;
            rep.survival.push_back({cfg.k_levels[j], p, std::sqrt(p * (1.0 - p) / n),
                                    std::pow(cfg.omega1 * cfg.omega2, cfg.k_levels[j])});
        }
        rep.quenched_mean = mean.mean();
        rep.quenched_mean_se = mean.stderr_of_mean();
        rep.quenched_mean_exact = edge_exit_mean(cfg.omega1, cfg.omega2);
    }

    // (ii) annealed F: one fresh pair of sites per sample, in sample order
    if (cfg.n_env > 0) {
        const std::size_t chunks = (cfg.n_env + kChunk - 1) / kChunk;
        Site e;
        e[cfg.axis] = 1;
        const auto times = map_replicas<std::vector<double>>(chunks, cfg.workers, [&](std::size_t c) {
            const std::size_t n = std::min(kChunk, cfg.n_env - c * kChunk);
            std::vector<double> out(n);
            std::size_t timeouts = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = c * kChunk + i;
                const std::uint64_t env_seed = derive_seed(cfg.seed, r, 0);
                const auto w0 = sample_site(law, env_seed, Site{});
                const auto w1 = sample_site(law, env_seed, e);
                SplitMix64 rng(derive_seed(cfg.seed, r, 1));
                const auto f = edge_exit_time(w0.data(), w1.data(), cfg.axis, rng, cfg.max_steps);
                timeouts += f == cfg.max_steps ? 1 : 0;
                out[i] = static_cast<double>(f);
            }
            out.push_back(static_cast<double>(timeouts));
            return out;
        });
        double sum = 0.0;
        std::size_t seen = 0;
        auto next = cfg.running_checkpoints.begin();
        for (const auto& chunk : times) {
            rep.timeouts += static_cast<std::size_t>(chunk.back());
            for (std::size_t i = 0; i + 1 < chunk.size(); ++i) {
                sum += chunk[i];
                rep.max_F = std::max(rep.max_F, chunk[i]);
                ++seen;
                while (next != cfg.running_checkpoints.end() && *next == seen) {
                    rep.running_means.emplace_back(seen, sum / static_cast<double>(seen));
                    ++next;
                }
            }
        }
    }

    // (iii) T_m / m along e_1, one fresh environment per walk
    if (cfg.n_walk > 0 && !cfg.m_levels.empty()) {
        struct Row {
            std::vector<double> ratios;
            std::size_t timeouts = 0;
        };
        const auto rows = map_replicas<Row>(cfg.n_walk, cfg.workers, [&](std::size_t r) {
            RealizedEnvironment env(law, derive_seed(cfg.seed, r, 4));
            SplitMix64 rng(derive_seed(cfg.seed, r, 5));
            Row row;
            Site x;
            std::uint64_t n = 0;
            for (int m : cfg.m_levels) {
                while (x[0] < m && n < cfg.max_steps) {
                    x = step(env, x, rng);
                    ++n;
                }
                if (x[0] < m) ++row.timeouts;
                row.ratios.push_back(static_cast<double>(n) / m);
            }
            return row;
        });
        for (std::size_t j = 0; j < cfg.m_levels.size(); ++j) {
            RunningStats rs;
            for (const auto& row : rows) rs.add(row.ratios[j]);
            rep.hitting.push_back({cfg.m_levels[j], rs.mean(), rs.count() > 1 ? rs.stderr_of_mean() : 0.0});
        }
        for (const auto& row : rows) rep.timeouts += row.timeouts;
    }
    return rep;
}

}  // namespace rwre
